#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "meltpinn/cli_io/commands.hpp"
#include "meltpinn/cli_io/config.hpp"
#include "meltpinn/cli_io/report.hpp"
#include "meltpinn/network/network.hpp"
#include "meltpinn/parallel.hpp"

using namespace meltpinn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "meltpinn_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p.string();
}

const char* kSmallStefan = R"({
  "schema_version": 1,
  "problem": "stefan",
  "network": {"hidden": [8, 8], "seed": 3},
  "train": {"epochs": 10, "checkpoint_interval": 5, "collocation": {"interior": 64, "contact": 16}},
  "stefan": {"initial_points": 40}
})";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MELTPINN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("train writes checkpoint, history and manifest") {
  const auto dir = scratch("train");
  io::CommandOptions o;
  o.config_path = write_config(dir, kSmallStefan);
  o.out_dir = (dir / "out").string();
  std::ostringstream log;
  REQUIRE(io::cmd_train(o, log) == io::kExitOk);

  const auto out = dir / "out";
  for (const char* f : {"model.ckpt", "history.csv", "manifest.json", "epoch_000005.ckpt", "epoch_000010.ckpt"})
    CHECK_MESSAGE(fs::exists(out / f), f);

  const auto hist = lines(slurp(out / "history.csv"));
  REQUIRE(hist.size() == 11);
  CHECK(hist[0] == "epoch,L_data,L_pde1,L_pde2,total,lr");
  CHECK(hist[1].rfind("0,", 0) == 0);
  CHECK(hist[10].rfind("9,", 0) == 0);

  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["command"] == "train");
  CHECK(m["seed"] == 1);
  CHECK(m["status"] == "ok");
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["versions"]["checkpoint_format"] == nn::kCheckpointVersion);
  CHECK(m["versions"].contains("eigen"));
  CHECK(m["versions"].contains("meltpinn"));

  // lossless round trip of the stored weights
  const std::string text = slurp(out / "model.ckpt");
  const auto net = nn::from_checkpoint_string(text);
  CHECK(nn::to_checkpoint_string(net) == text);
  CHECK(net.layer_sizes == std::vector<int>{2, 8, 8, 2});
}

TEST_CASE("training is reproducible and the seed flag changes it") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, kSmallStefan);
  std::ostringstream log;
  auto run = [&](const std::string& sub, std::optional<std::uint64_t> seed) {
    io::CommandOptions o;
    o.config_path = cfg;
    o.out_dir = (dir / sub).string();
    o.seed = seed;
    REQUIRE(io::cmd_train(o, log) == io::kExitOk);
    return slurp(dir / sub / "history.csv");
  };
  const auto a = run("a", std::nullopt), b = run("b", std::nullopt), c = run("c", 99);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(slurp(dir / "a" / "model.ckpt") == slurp(dir / "b" / "model.ckpt"));
  const auto mc = nlohmann::json::parse(slurp(dir / "c" / "manifest.json"));
  CHECK(mc["seed"] == 99);
}

TEST_CASE("divergence exits 3 and keeps the partial run") {
  const auto dir = scratch("diverge");
  io::CommandOptions o;
  o.config_path = write_config(dir, R"({"schema_version": 1, "network": {"hidden": [8, 8]},
    "train": {"epochs": 20, "adam": {"lr": 1e300}, "collocation": {"interior": 32, "contact": 8}},
    "stefan": {"initial_points": 20}})");
  o.out_dir = (dir / "out").string();
  std::ostringstream log;
  CHECK(io::cmd_train(o, log) == io::kExitDiverged);
  CHECK(log.str().find("diverged") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "last_good.ckpt"));
  const auto hist = lines(slurp(dir / "out" / "history.csv"));
  CHECK(hist.size() >= 2);
  CHECK(hist.size() < 21);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "manifest.json"))["status"] == "diverged");
}

TEST_CASE("invalid configurations exit 2 naming the field") {
  const auto dir = scratch("invalid");
  struct Case {
    const char* json;
    const char* field;
  };
  const Case cases[] = {
      {R"({"schema_version": 1, "train": {"weights": {"pde_interior": 0.7, "pde_neumann": 0.6}}})", "weights"},
      {R"({"schema_version": 1, "train": {"weights": {"pde_interior": 1.5}}})", "weights"},
      {R"({"schema_version": 1, "trian": {}})", "trian"},
      {R"({"schema_version": 1, "train": {"adam": {"lr": -1}}})", "lr"},
      {R"({"schema_version": 2})", "schema_version"},
      {R"({"problem": "stefan"})", "schema_version"},
      {R"({"schema_version": 1, "problem": "ambench-D"})", "problem"},
      {R"({"schema_version": 1, "network": {"hidden": [0]}})", "hidden"},
      {R"({"schema_version": 1, "train": {"epochs": "many"}})", "epochs"},
      {R"({"schema_version": 1, "train": {"bc_mode": "medium"}})", "bc_mode"},
      {R"({"schema_version": 1, "eval": {"grid": [10, 10, 10]}})", "grid"},
      {R"({"schema_version": 1, "problem": "ambench-A", "ambench": {"window": [2e-3, 1e-3]}})", "window"},
      {R"({"schema_version": 1, "problem": "ambench-A", "ambench": {"dataset": "/no/such/file.csv"}})", "dataset"},
      {R"({"schema_version": 1, "stefan": {"focus_half_width": 0}})", "focus_half_width"},
      {R"({not json)", ""},
  };
  for (const auto& c : cases) {
    CAPTURE(c.json);
    CHECK_THROWS_AS(io::parse_config(c.json), io::ConfigError);
    try {
      io::parse_config(c.json);
    } catch (const io::ConfigError& e) {
      CHECK(std::string(e.what()).find(c.field) != std::string::npos);
    }
    io::CommandOptions o;
    o.config_path = write_config(dir, c.json);
    o.out_dir = (dir / "out").string();
    std::ostringstream log;
    CHECK(io::cmd_train(o, log) == io::kExitUsage);
    CHECK(log.str().find(c.field) != std::string::npos);
  }
}

TEST_CASE("config parsing, defaults and hash") {
  const auto c = io::parse_config(R"({"schema_version": 1})");
  CHECK(c.kind() == io::ProblemKind::Stefan);
  CHECK(c.hidden == std::vector<int>{200, 200, 200, 200, 200});
  CHECK(c.eval_grid == std::vector<int>{100, 100});

  const auto a = io::parse_config(R"({"schema_version": 1, "problem": "ambench-B", "output_dir": "x"})");
  CHECK(a.kind() == io::ProblemKind::AmBench);
  CHECK(a.case_id() == "B");
  CHECK(a.out_dir == "x");
  CHECK(a.eval_grid.size() == 4);

  // canonical form is order independent and sensitive to values
  const auto p = io::parse_config(R"({"schema_version": 1, "train": {"epochs": 7, "seed": 4}})");
  const auto q = io::parse_config(R"({"train": {"seed": 4, "epochs": 7}, "schema_version": 1})");
  const auto r = io::parse_config(R"({"schema_version": 1, "train": {"epochs": 8, "seed": 4}})");
  CHECK(io::canonical_json(p) == io::canonical_json(q));
  CHECK(io::canonical_json(p) != io::canonical_json(r));
  CHECK(io::parse_config(io::canonical_json(p)).train.epochs == 7);

  CHECK_THROWS_AS(io::load_config("/no/such/config.json"), io::ConfigError);
}

TEST_CASE("ambench training requires the full-scale flag") {
  const auto dir = scratch("fullscale");
  io::CommandOptions o;
  o.config_path = write_config(dir, R"({"schema_version": 1, "problem": "ambench-A"})");
  o.out_dir = (dir / "out").string();
  std::ostringstream log;
  CHECK(io::cmd_train(o, log) == io::kExitUsage);
  CHECK(log.str().find("--full-scale") != std::string::npos);
}

TEST_CASE("eval writes the labeled grid") {
  const auto dir = scratch("eval");
  io::CommandOptions o;
  o.config_path = write_config(dir, kSmallStefan);
  o.out_dir = (dir / "out").string();
  std::ostringstream log;
  REQUIRE(io::cmd_train(o, log) == io::kExitOk);
  REQUIRE(io::cmd_eval(o, log) == io::kExitOk);
  const auto rows = lines(slurp(dir / "out" / "eval.csv"));
  REQUIRE(rows.size() == 10001);
  CHECK(rows[0] == "t,x,T_mold,T_al,T");

  // the selected column follows the region, and the hard boundary values hold
  const auto net = nn::load_checkpoint((dir / "out" / "model.ckpt").string());
  for (const std::size_t i : {std::size_t{1}, std::size_t{100}, std::size_t{4950}, std::size_t{10000}}) {
    std::vector<double> v;
    std::stringstream ss(rows[i]);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 5);
    CHECK(v[4] == (v[1] <= 0.0 ? v[2] : v[3]));
    if (v[1] == -0.4) CHECK(v[4] == doctest::Approx(298.15).epsilon(1e-14));
    if (v[1] == 0.4) CHECK(v[4] == doctest::Approx(973.15).epsilon(1e-14));
  }

  // empty grid gives the header alone
  o.config_path = write_config(dir, R"({"schema_version": 1, "network": {"hidden": [8, 8], "seed": 3},
                                        "eval": {"grid": [0, 100]}})");
  REQUIRE(io::cmd_eval(o, log) == io::kExitOk);
  CHECK(slurp(dir / "out" / "eval.csv") == "t,x,T_mold,T_al,T\n");

  // mismatched architecture
  o.config_path = write_config(dir, R"({"schema_version": 1, "network": {"hidden": [4]}})");
  std::ostringstream err;
  CHECK(io::cmd_eval(o, err) == io::kExitUsage);
  CHECK(err.str().find("2x8x8x2") != std::string::npos);

  // a 3D problem cannot read a 1D checkpoint
  o.config_path = write_config(dir, R"({"schema_version": 1, "problem": "mms", "network": {"hidden": [8, 8]}})");
  CHECK(io::cmd_eval(o, err) == io::kExitUsage);

  o.config_path = write_config(dir, kSmallStefan);
  o.checkpoint = (dir / "missing.ckpt").string();
  CHECK(io::cmd_eval(o, err) == io::kExitFailure);
}

TEST_CASE("bench dispatch") {
  const auto dir = scratch("bench");
  io::CommandOptions o;
  o.out_dir = dir.string();
  std::ostringstream log;
  CHECK(io::cmd_bench("fem-refinee", o, log) == io::kExitUsage);
  CHECK(log.str().find("unknown benchmark") != std::string::npos);

  std::ostringstream mms;
  CHECK(io::cmd_bench("mms", o, mms) == io::kExitOk);
  const auto report = lines(slurp(dir / "mms.txt"));
  REQUIRE(report.size() == 1);
  CHECK(report[0].rfind("PASS mms points=10000", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "manifest.json"))["command"] == "bench mms");

  o.config_path = write_config(dir, R"({"schema_version": 1, "problem": "mms"})");
  CHECK(io::cmd_bench("hard-vs-soft", o, log) == io::kExitUsage);
}

TEST_CASE("command line front end") {
  const auto dir = scratch("frontend");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("train --seed notanumber") == 2);
  CHECK(run_cli("bench nope --out " + dir.string()) == 2);
  CHECK(run_cli("train --out " + dir.string()) == 2);  // no config
  CHECK(run_cli("bench mms --out " + dir.string()) == 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("bench mms --out " + dir.string() + " MELTPINN_IGNORED") == 2);
  const std::string env = "MELTPINN_THREADS=zero ";
  const int status = std::system((env + MELTPINN_CLI + " bench mms --out " + dir.string() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}

TEST_CASE("thread count from the environment") {
  ::setenv("MELTPINN_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  for (const char* bad : {"0", "-2", "four", "3x", "5000"}) {
    ::setenv("MELTPINN_THREADS", bad, 1);
    CHECK_THROWS_AS(thread_count_from_env(), ContractViolation);
  }
  ::unsetenv("MELTPINN_THREADS");
  CHECK(thread_count_from_env() >= 1);

  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) { require(i != 7, "seven"); }), ContractViolation);
}

TEST_CASE("numbers survive the text formats") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(mant(rng), ex(rng));
    CHECK(std::stod(io::format_double(v)) == v);
  }
  const io::CsvTable t{{"a", "b"}, {{0.1, 1e-300}, {-2.5, 3.0}}};
  CHECK(io::to_csv(t) == "a,b\n0.10000000000000001,1e-300\n-2.5,3\n");
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(io::hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(io::hex64(1) == "0000000000000001");
}

TEST_CASE("dimension report") {
  ambench::MeltPoolDims d;
  d.length = 650e-6;
  d.width = 120e-6;
  d.depth = 45.5e-6;
  d.molten = true;
  const auto j = nlohmann::json::parse(io::dimension_report_json("B", d));
  CHECK(j["case"] == "B");
  CHECK(j["units"] == "um");
  CHECK(j["length"].get<double>() == doctest::Approx(650.0));
  CHECK(j["width"].get<double>() == doctest::Approx(120.0));
  CHECK(j["depth"].get<double>() == doctest::Approx(45.5));
  CHECK(j["reference"]["length"] == 782.0);
  CHECK(j["reference"]["length_uncertainty"] == 21.0);
  CHECK_FALSE(j.contains("warning"));

  CHECK(io::reference_length("A").center == 659.0);
  CHECK(io::reference_length("A").half_width == 21.0);
  CHECK(io::reference_length("C").center == 754.0);
  CHECK(io::reference_length("C").half_width == 46.0);
  CHECK_THROWS_AS(io::reference_length("D"), ContractViolation);

  d.molten = false;
  d.length = d.width = d.depth = 0.0;
  const auto k = nlohmann::json::parse(io::dimension_report_json("A", d));
  CHECK(k["molten"] == false);
  CHECK(k.contains("warning"));
}

TEST_CASE("ambench eval writes the field grid and a dimension report") {
  const auto dir = scratch("ambench_eval");
  io::CommandOptions o;
  o.config_path = write_config(dir, R"({"schema_version": 1, "problem": "ambench-A", "network": {"hidden": [8]},
                                        "eval": {"grid": [2, 3, 3, 2]}})");
  o.out_dir = (dir / "out").string();
  fs::create_directories(dir / "out");
  nn::save_checkpoint(nn::init_params({4, 8, 5}, 5), (dir / "out" / "model.ckpt").string());
  std::ostringstream log;
  REQUIRE(io::cmd_eval(o, log) == io::kExitOk);
  const auto rows = lines(slurp(dir / "out" / "eval.csv"));
  REQUIRE(rows.size() == 1 + 2 * 3 * 3 * 2);
  CHECK(rows[0] == "t,x,y,z,u,v,w,p,T");
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "dimensions.json"));
  CHECK(report["case"] == "A");
  CHECK(report["units"] == "um");
  CHECK(report["reference"]["length"] == 659.0);
}
