#include "doctest.h"

#include "lpup/cli.hpp"
#include "lpup/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace lpup;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("lpup_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation lpup_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lpup");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  set_max_threads(0);
  return {code, out.str(), err.str()};
}

const char* kProduct = R"({"experiment": "up_product",
  "grid": {"dim": 1, "half_width": 20, "points": 2048},
  "params": {"side1": {"a": 2, "b": 1, "k": 2}, "side2": {"a": 2, "b": 1, "k": 2},
             "data": {"kind": "gaussian", "width": 1}},
  "seed": 1})";

const char* kGrowth = R"({"experiment": "moment_growth",
  "grid": {"dim": 1, "half_width": 20, "points": 256},
  "params": {"flow": "schrodinger", "method": "analytic", "a": 2, "b": 1,
             "times": {"lo": 10, "hi": 100, "count": 8}}})";

const char* kCorpus = R"({"experiment": "lemma_corpus",
  "grid": {"dim": 1, "half_width": 20, "points": 512},
  "params": {"members": 20, "lemma1": {"a": 2, "b": 1, "s": 2, "p": 1}, "lemma2": [[2, 4, 2, 1]]},
  "seed": 11})";

}  // namespace

TEST_CASE("check-params verdicts") {
  auto dir = scratch("check");
  auto ok = lpup_cli({"check-params", "--config", write_config(dir, "ok.json", kProduct).string()});
  CHECK(ok.code == cli::ExitCode::ok);
  CHECK(ok.out.find("ADMISSIBLE") != std::string::npos);
  CHECK(ok.out.find("[ok] critical index 1 = 2/3 < 2") != std::string::npos);

  auto below = write_config(dir, "below.json", R"({"experiment": "up_product",
    "grid": {"dim": 1, "half_width": 20, "points": 256},
    "params": {"side1": {"a": 2, "b": 1, "k": "1/2"}, "side2": {"a": 2, "b": 1, "k": 2}}})");
  auto bad = lpup_cli({"check-params", "--config", below.string()});
  CHECK(bad.code == cli::ExitCode::violation);
  CHECK(bad.out.find("k_1 below critical index") != std::string::npos);

  // p = 2n/(n-1) = 3 in R^3.
  auto endpoint = write_config(dir, "endpoint.json", R"({"experiment": "up_product",
    "grid": {"dim": 3, "half_width": 10, "points": 32},
    "params": {"side1": {"a": 3, "b": 1, "k": 3}, "side2": {"a": 3, "b": 1, "k": 3}}})");
  auto open = lpup_cli({"check-params", "--config", endpoint.string()});
  CHECK(open.code == cli::ExitCode::unknown);
  CHECK(open.out.find("UNKNOWN (open endpoint)") != std::string::npos);

  auto above = write_config(dir, "above.json", R"({"experiment": "up_product",
    "grid": {"dim": 3, "half_width": 10, "points": 32},
    "params": {"side1": {"a": 4, "b": 1, "k": 4}, "side2": {"a": 4, "b": 1, "k": 4}}})");
  CHECK(lpup_cli({"check-params", "--config", above.string()}).code == cli::ExitCode::violation);

  auto garbage = write_config(dir, "garbage.json", "{not json");
  auto g = lpup_cli({"check-params", "--config", garbage.string()});
  CHECK(g.code == cli::ExitCode::usage);
  CHECK_FALSE(g.err.empty());
  CHECK(lpup_cli({"check-params"}).code == cli::ExitCode::usage);
  CHECK(lpup_cli({"frobnicate", "--config", garbage.string()}).code == cli::ExitCode::usage);
}

TEST_CASE("run writes a deterministic record") {
  auto dir = scratch("run");
  auto cfg = write_config(dir, "growth.json", kGrowth);
  auto first = lpup_cli({"run", "--config", cfg.string(), "--out", (dir / "a").string()});
  auto second = lpup_cli({"run", "--config", cfg.string(), "--out", (dir / "b").string()});
  REQUIRE(first.code == cli::ExitCode::ok);
  REQUIRE(second.code == cli::ExitCode::ok);
  CHECK(first.out.find("moment_growth: PASS slope=") != std::string::npos);
  CHECK(slurp(dir / "a" / "moment_growth.json") == slurp(dir / "b" / "moment_growth.json"));
  CHECK(slurp(dir / "a" / "moment_growth_trace.csv") == slurp(dir / "b" / "moment_growth_trace.csv"));

  Json rec = Json::parse(slurp(dir / "a" / "moment_growth.json"));
  CHECK(rec["ok"] == true);
  CHECK(rec["measured"]["slope"].get<double>() == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(rec["predicted"]["slope"]["formula"] == "dim*(1/a+b/dim-1/2)");
  CHECK(rec["params"]["experiment"] == "moment_growth");
  CHECK_FALSE(rec["params"].contains("output_dir"));
  std::string csv = slurp(dir / "a" / "moment_growth_trace.csv");
  CHECK(csv.rfind("t,moment\n10,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("run refuses invalid configs before computing") {
  auto dir = scratch("refuse");
  auto inadmissible = write_config(dir, "inadmissible.json", R"({"experiment": "moment_growth",
    "grid": {"dim": 1, "half_width": 20, "points": 256},
    "params": {"a": "inf", "b": "1/4", "times": {"lo": 10, "hi": 100}}})");
  auto r = lpup_cli({"run", "--config", inadmissible.string(), "--out", (dir / "o1").string()});
  CHECK(r.code == cli::ExitCode::violation);
  CHECK_FALSE(fs::exists(dir / "o1"));

  auto unknown = write_config(dir, "unknown.json", R"({"experiment": "nope",
    "grid": {"dim": 1, "half_width": 20, "points": 256}})");
  auto u = lpup_cli({"run", "--config", unknown.string(), "--out", (dir / "o2").string()});
  CHECK(u.code == cli::ExitCode::usage);
  CHECK(u.err.find("unknown experiment 'nope'") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o2"));

  auto grid = write_config(dir, "grid.json", R"({"experiment": "up_product",
    "grid": {"dim": 1, "half_width": 20, "points": 100}, "params": {}})");
  CHECK(lpup_cli({"run", "--config", grid.string(), "--out", (dir / "o3").string()}).code == cli::ExitCode::usage);
  CHECK_FALSE(fs::exists(dir / "o3"));

  // Admissible, but the data spill over the box.
  auto wide = write_config(dir, "wide.json", R"({"experiment": "up_product",
    "grid": {"dim": 1, "half_width": 4, "points": 256},
    "params": {"side1": {"a": 2, "b": 1, "k": 2}, "side2": {"a": 2, "b": 1, "k": 2},
               "data": {"width": 0.05}}})");
  auto w = lpup_cli({"run", "--config", wide.string(), "--out", (dir / "o4").string()});
  CHECK(w.code == cli::ExitCode::numerical);
  CHECK(w.err.find("enlarge the grid") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o4"));
}

TEST_CASE("failed checks exit 1 with a record") {
  auto dir = scratch("fail");
  // A zero tolerance cannot be met by a floating-point slope.
  auto cfg = write_config(dir, "tight.json", R"({"experiment": "moment_growth",
    "grid": {"dim": 1, "half_width": 20, "points": 256},
    "params": {"a": 2, "b": 1, "times": {"lo": 10, "hi": 100}},
    "tolerances": {"slope_rel": 0}})");
  auto r = lpup_cli({"run", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == cli::ExitCode::violation);
  Json rec = Json::parse(slurp(dir / "moment_growth.json"));
  CHECK(rec["ok"] == false);
  CHECK(rec["tolerances"]["slope_rel"] == 0.0);
}

TEST_CASE("seed, thread and output overrides") {
  auto dir = scratch("overrides");
  auto cfg = write_config(dir, "corpus.json", kCorpus);
  REQUIRE(lpup_cli({"run", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(lpup_cli({"run", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "1"}).code == 0);
  REQUIRE(lpup_cli({"run", "--config", cfg.string(), "--out", (dir / "c").string(), "--seed", "12"}).code == 0);
  std::string a = slurp(dir / "a" / "lemma_corpus.json");
  CHECK(a == slurp(dir / "b" / "lemma_corpus.json"));
  Json c = Json::parse(slurp(dir / "c" / "lemma_corpus.json"));
  CHECK(c["params"]["seed"] == 12);
  CHECK(c["measured"] != Json::parse(a)["measured"]);

  ::setenv("LPUP_OUT_DIR", (dir / "env").string().c_str(), 1);
  auto e = lpup_cli({"run", "--config", cfg.string()});
  ::unsetenv("LPUP_OUT_DIR");
  CHECK(e.code == 0);
  CHECK(slurp(dir / "env" / "lemma_corpus.json") == a);
}

TEST_CASE("sweeps") {
  auto dir = scratch("sweep");
  auto cfg = write_config(dir, "product.json", kProduct);
  auto none = lpup_cli({"sweep", "--config", cfg.string(), "--axis", "params.data.dilation", "--values", "",
                        "--out", (dir / "empty").string()});
  CHECK(none.code == cli::ExitCode::ok);
  CHECK_FALSE(fs::exists(dir / "empty"));

  auto s = lpup_cli({"sweep", "--config", cfg.string(), "--axis", "params.data.dilation", "--values",
                     "0.25,0.5,1,2,4", "--out", (dir / "dilation").string()});
  CHECK(s.code == cli::ExitCode::ok);
  Json index = Json::parse(slurp(dir / "dilation" / "sweep.json"));
  REQUIRE(index["members"].size() == 5);
  for (const auto& m : index["members"]) {
    Json rec = Json::parse(slurp(dir / "dilation" / m["directory"].get<std::string>() / "up_product.json"));
    CHECK(rec["measured"]["product"].get<double>() == doctest::Approx(0.5).epsilon(5e-3));
  }

  // The second member is inadmissible; the third still runs.
  auto mixed = lpup_cli({"sweep", "--config", cfg.string(), "--axis", "params.side1.k", "--values", "2,1/2,3/2",
                         "--out", (dir / "mixed").string()});
  CHECK(mixed.code == cli::ExitCode::violation);
  Json m = Json::parse(slurp(dir / "mixed" / "sweep.json"));
  REQUIRE(m["members"].size() == 3);
  CHECK(m["members"][0]["exit_code"] == 0);
  CHECK(m["members"][1]["exit_code"] == 1);
  CHECK(m["members"][1]["record"].is_null());
  CHECK(m["members"][2]["exit_code"] == 0);
  CHECK_FALSE(fs::exists(dir / "mixed" / m["members"][1]["directory"].get<std::string>()));
}
