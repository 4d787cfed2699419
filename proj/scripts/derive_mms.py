#!/usr/bin/env python3
"""Derive manufactured fields and forcing for the 3D thermal-fluid residuals.

Writes include/meltpinn/ambench/mms_generated.hpp. The residual definitions
below are written out independently of the C++ implementation.
"""

import pathlib
import sympy as sp

t, x, y, z = sp.symbols("t x y z", real=True)
inputs = (t, x, y, z)
space = (x, y, z)

# Dimensionless material with temperature-dependent properties and a phase ramp.
MAT = dict(
    density_liquid=1.2, density_solid=1.0,
    viscosity_liquid=0.05, viscosity_solid=0.1,
    cp_solid=(1.0, 0.1, 0.02), cp_liquid=(1.5, 0.0, 0.0),
    k_solid=(0.5, 0.05, 0.0), k_liquid=(0.8, 0.0, 0.0),
    solidus=0.5, liquidus=1.5, latent_heat=2.0,
)

# Velocity as the curl of a vector potential, so div u = 0 identically.
A = sp.Matrix([
    sp.Rational(3, 10) * sp.sin(y) * sp.cos(z + t),
    sp.Rational(1, 5) * sp.cos(x) * sp.sin(z),
    sp.Rational(1, 4) * sp.sin(x + y) * sp.cos(t),
])
u = sp.Matrix([
    sp.diff(A[2], y) - sp.diff(A[1], z),
    sp.diff(A[0], z) - sp.diff(A[2], x),
    sp.diff(A[1], x) - sp.diff(A[0], y),
])
p = sp.cos(x) * sp.sin(y) * z + t
# Stays inside (solidus, liquidus) so the phase ramp is active everywhere.
T = 1 + sp.Rational(1, 5) * sp.sin(x + t) * sp.cos(y) + sp.Rational(1, 5) * sp.cos(z - t / 2)


def poly(c, v):
    return c[0] + c[1] * v + c[2] * v ** 2


fL = (T - MAT["solidus"]) / (MAT["liquidus"] - MAT["solidus"])


def blend(liquid, solid):
    return fL * liquid + (1 - fL) * solid


rho = blend(MAT["density_liquid"], MAT["density_solid"])
mu = blend(MAT["viscosity_liquid"], MAT["viscosity_solid"])
cp = blend(poly(MAT["cp_liquid"], T), poly(MAT["cp_solid"], T))
kappa = blend(poly(MAT["k_liquid"], T), poly(MAT["k_solid"], T))
L = MAT["latent_heat"]


def grad(f):
    return sp.Matrix([sp.diff(f, s) for s in space])


def lap(f):
    return sum(sp.diff(f, s, 2) for s in space)


# rho (u_t + u.grad u - g) + grad p - 2 mu lap u = 0  =>  g
g = sp.Matrix([
    sp.diff(u[i], t) + (u.T * grad(u[i]))[0] + (sp.diff(p, space[i]) - 2 * mu * lap(u[i])) / rho
    for i in range(3)
])
# (rho cp T)_t + u.grad(rho cp T) + (rho L fL)_t + u.(rho L grad fL) - kappa lap T - Q = 0  =>  Q
H = rho * cp * T
Q = (sp.diff(H, t) + (u.T * grad(H))[0] + sp.diff(rho * L * fL, t)
     + (u.T * (rho * L * grad(fL)))[0] - kappa * lap(T))

fields = [u[0], u[1], u[2], p, T]
entries = []
for f in fields:
    entries.append(f)
    entries += [sp.diff(f, s) for s in inputs]
    entries += [sp.diff(f, s, 2) for s in inputs]
forcing = [g[0], g[1], g[2], Q]


def emit(name, exprs):
    subs, reduced = sp.cse(exprs, symbols=sp.numbered_symbols("c"))
    lines = [f"inline void {name}(double t, double x, double y, double z, double* out) {{"]
    for s, e in subs:
        lines.append(f"  const double {s} = {sp.ccode(e)};")
    for i, e in enumerate(reduced):
        lines.append(f"  out[{i}] = {sp.ccode(e)};")
    lines.append("}")
    return "\n".join(lines)


def tup(c):
    return ", ".join(repr(float(v)) for v in c)


header = f"""#pragma once

// Generated by scripts/derive_mms.py. Do not edit by hand.

#include <cmath>

namespace meltpinn::ambench::mms_generated {{

inline constexpr double kDensityLiquid = {MAT['density_liquid']!r};
inline constexpr double kDensitySolid = {MAT['density_solid']!r};
inline constexpr double kViscosityLiquid = {MAT['viscosity_liquid']!r};
inline constexpr double kViscositySolid = {MAT['viscosity_solid']!r};
inline constexpr double kHeatCapacitySolid[3] = {{{tup(MAT['cp_solid'])}}};
inline constexpr double kHeatCapacityLiquid[3] = {{{tup(MAT['cp_liquid'])}}};
inline constexpr double kConductivitySolid[3] = {{{tup(MAT['k_solid'])}}};
inline constexpr double kConductivityLiquid[3] = {{{tup(MAT['k_liquid'])}}};
inline constexpr double kSolidus = {MAT['solidus']!r};
inline constexpr double kLiquidus = {MAT['liquidus']!r};
inline constexpr double kLatentHeat = {MAT['latent_heat']!r};

// Per field (u, v, w, p, T): value, d/d(t,x,y,z), d2/d(t,x,y,z)2. 45 entries.
{emit('fields', entries)}

// Body force g (3 entries) and heat source Q_T.
{emit('forcing', forcing)}

}}  // namespace meltpinn::ambench::mms_generated
"""

out = pathlib.Path(__file__).resolve().parent.parent / "include/meltpinn/ambench/mms_generated.hpp"
out.write_text(header)
print(f"wrote {out}")
