#pragma once

// Generated by scripts/derive_mms.py. Do not edit by hand.

#include <cmath>

namespace meltpinn::ambench::mms_generated {

inline constexpr double kDensityLiquid = 1.2;
inline constexpr double kDensitySolid = 1.0;
inline constexpr double kViscosityLiquid = 0.05;
inline constexpr double kViscositySolid = 0.1;
inline constexpr double kHeatCapacitySolid[3] = {1.0, 0.1, 0.02};
inline constexpr double kHeatCapacityLiquid[3] = {1.5, 0.0, 0.0};
inline constexpr double kConductivitySolid[3] = {0.5, 0.05, 0.0};
inline constexpr double kConductivityLiquid[3] = {0.8, 0.0, 0.0};
inline constexpr double kSolidus = 0.5;
inline constexpr double kLiquidus = 1.5;
inline constexpr double kLatentHeat = 2.0;

// Per field (u, v, w, p, T): value, d/d(t,x,y,z), d2/d(t,x,y,z)2. 45 entries.
inline void fields(double t, double x, double y, double z, double* out) {
  const double c0 = cos(x);
  const double c1 = cos(z);
  const double c2 = (1.0/5.0)*c1;
  const double c3 = c0*c2;
  const double c4 = cos(t);
  const double c5 = x + y;
  const double c6 = cos(c5);
  const double c7 = (1.0/4.0)*c6;
  const double c8 = c4*c7;
  const double c9 = c7*sin(t);
  const double c10 = sin(x);
  const double c11 = c10*c2;
  const double c12 = (1.0/4.0)*c4*sin(c5);
  const double c13 = -c12;
  const double c14 = sin(z);
  const double c15 = (1.0/5.0)*c14;
  const double c16 = c0*c15;
  const double c17 = -c8;
  const double c18 = 5*c4*c6;
  const double c19 = t + z;
  const double c20 = sin(c19);
  const double c21 = sin(y);
  const double c22 = (3.0/10.0)*c21;
  const double c23 = c20*c22;
  const double c24 = cos(c19);
  const double c25 = c22*c24;
  const double c26 = -c25;
  const double c27 = cos(y);
  const double c28 = (3.0/10.0)*c27;
  const double c29 = c20*c28;
  const double c30 = (1.0/20.0)*c18 + (3.0/10.0)*c20*c21;
  const double c31 = c10*c15;
  const double c32 = c24*c28;
  const double c33 = c0*c21;
  const double c34 = c33*z;
  const double c35 = -c34;
  const double c36 = t + x;
  const double c37 = sin(c36);
  const double c38 = (1.0/5.0)*c27;
  const double c39 = c37*c38;
  const double c40 = (1.0/2.0)*t - z;
  const double c41 = cos(c40);
  const double c42 = (1.0/5.0)*c41;
  const double c43 = cos(c36);
  const double c44 = sin(c40);
  const double c45 = -c39;
  out[0] = -c3 + c8;
  out[1] = -c9;
  out[2] = c11 + c13;
  out[3] = c13;
  out[4] = c16;
  out[5] = c17;
  out[6] = (1.0/5.0)*c0*c1 - 1.0/20.0*c18;
  out[7] = c17;
  out[8] = c3;
  out[9] = -c23 - c8;
  out[10] = c26 + c9;
  out[11] = c12;
  out[12] = -c13 - c29;
  out[13] = c26;
  out[14] = c30;
  out[15] = c8;
  out[16] = c30;
  out[17] = c23;
  out[18] = -c31 - c32;
  out[19] = c29;
  out[20] = -c16;
  out[21] = c25;
  out[22] = -c11 + c29;
  out[23] = c32;
  out[24] = c31;
  out[25] = c32;
  out[26] = (1.0/5.0)*c10*c14 + (3.0/10.0)*c24*c27;
  out[27] = c34 + t;
  out[28] = 1;
  out[29] = -c10*c21*z;
  out[30] = c0*c27*z;
  out[31] = c33;
  out[32] = 0;
  out[33] = c35;
  out[34] = c35;
  out[35] = 0;
  out[36] = c39 + c42 + 1;
  out[37] = (1.0/5.0)*c27*c43 - 1.0/10.0*c44;
  out[38] = c38*c43;
  out[39] = -1.0/5.0*c21*c37;
  out[40] = (1.0/5.0)*c44;
  out[41] = -1.0/5.0*c27*c37 - 1.0/20.0*c41;
  out[42] = c45;
  out[43] = c45;
  out[44] = -c42;
}

// Body force g (3 entries) and heat source Q_T.
inline void forcing(double t, double x, double y, double z, double* out) {
  const double c0 = x + y;
  const double c1 = cos(c0);
  const double c2 = (1.0/4.0)*c1*sin(t);
  const double c3 = sin(z);
  const double c4 = sin(x);
  const double c5 = (1.0/5.0)*c4;
  const double c6 = t + z;
  const double c7 = cos(c6);
  const double c8 = cos(y);
  const double c9 = (3.0/10.0)*c8;
  const double c10 = c3*c5 + c7*c9;
  const double c11 = -c10;
  const double c12 = cos(x);
  const double c13 = (1.0/5.0)*c12*c3;
  const double c14 = sin(y);
  const double c15 = sin(c6);
  const double c16 = c14*c15;
  const double c17 = cos(t);
  const double c18 = c1*c17;
  const double c19 = (1.0/4.0)*c18;
  const double c20 = (3.0/10.0)*c16 + c19;
  const double c21 = -c20;
  const double c22 = (1.0/4.0)*c17*sin(c0);
  const double c23 = cos(z);
  const double c24 = c23*c5;
  const double c25 = -c22;
  const double c26 = (1.0/5.0)*c12*c23;
  const double c27 = c19 - c26;
  const double c28 = t + x;
  const double c29 = sin(c28);
  const double c30 = c29*c8;
  const double c31 = (1.0/2.0)*t - z;
  const double c32 = cos(c31);
  const double c33 = 0.03999999999999998*c30 + 0.03999999999999998*c32 + 1.1000000000000001;
  const double c34 = 1.0/c33;
  const double c35 = 0.020000000000000004*c30 + 0.020000000000000004*c32;
  const double c36 = 0.15000000000000002 - c35;
  const double c37 = 5*c18;
  const double c38 = (3.0/10.0)*c14*c7;
  const double c39 = c15*c9;
  const double c40 = cos(c28);
  const double c41 = sin(c31);
  const double c42 = -0.20000000000000001*c40*c8 + 0.10000000000000001*c41;
  const double c43 = 0.07999999999999996*c30 + 0.07999999999999996*c32 + 2.2000000000000002;
  const double c44 = 0.03999999999999998*c41;
  const double c45 = 0.20000000000000001*c30 + 0.20000000000000001*c32;
  const double c46 = c40*c8;
  const double c47 = 0.20000000000000001*c46;
  const double c48 = 0.20000000000000001*c43;
  const double c49 = c14*c29;
  const double c50 = (1.0/5.0)*c32;
  const double c51 = 0.5 - c45;
  const double c52 = (1.0/5.0)*c30 + c50 + 1;
  const double c53 = c35 + 0.02*pow(c52, 2) + 1.1000000000000001;
  const double c54 = 0.30000000000000004*c30 + 0.30000000000000004*c32 + c51*c53 + 0.75;
  const double c55 = c33*c54;
  const double c56 = c52*c54;
  const double c57 = 0.30000000000000004*c46;
  const double c58 = 0.020000000000000004*c46;
  const double c59 = (1.0/5.0)*c41;
  const double c60 = c33*c52;
  const double c61 = 0.0080000000000000002*c52;
  const double c62 = 0.20000000000000001*c53;
  out[0] = c11*c13 - c2 - c21*c22 + c27*(c24 + c25) + c34*(-c14*c4*z - c36*((1.0/5.0)*c12*c23 - c19 + c26 - 1.0/20.0*c37));
  out[1] = -c11*c38 + c2 + c21*(-c25 - c39) + c22*c27 + c34*(c12*c8*z - c36*((3.0/10.0)*c16 + c20 + (1.0/20.0)*c37)) - c38;
  out[2] = c11*(-c24 + c39) - c13*c27 + c21*c38 + c34*(c12*c14 - c36*(c10 + (1.0/5.0)*c3*c4 + (3.0/10.0)*c7*c8)) + c39;
  out[3] = c11*c41*c48 + c11*(c44*c56 + c55*c59 + c60*(-c41*c62 + 0.30000000000000004*c41 + c51*(c41*c61 + 0.020000000000000004*c41))) - c21*c48*c49 + c21*(c33*c52*(c49*c62 - 0.30000000000000004*c49 + c51*(-c49*c61 - 0.020000000000000004*c49)) - 1.0/5.0*c49*c55 - 0.03999999999999998*c49*c56) + c27*c43*c47 + c27*((1.0/5.0)*c46*c55 + 0.03999999999999998*c46*c56 + c60*(-c47*c53 + c51*(c46*c61 + c58) + c57)) - c42*c43 + c55*((1.0/5.0)*c40*c8 - 1.0/10.0*c41) + c56*(0.03999999999999998*c40*c8 - 0.01999999999999999*c41) + c60*(-0.15000000000000002*c41 + c42*c53 + c51*(-0.010000000000000002*c41 + 0.02*c52*((2.0/5.0)*c40*c8 - c59) + c58) + c57) - (-2.0/5.0*c30 - c50)*(0.16000000000000003*c30 + 0.16000000000000003*c32 + c51*(0.010000000000000002*c30 + 0.010000000000000002*c32 + 0.55000000000000004) + 0.40000000000000002) + (c45 + 0.5)*(0.07999999999999996*c40*c8 - c44);
}

}  // namespace meltpinn::ambench::mms_generated
