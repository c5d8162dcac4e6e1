#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cli.hpp"
#include "colent/errors.hpp"
#include "colent/io.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kModels = COLENT_MODELS_DIR;
const std::string kGolden = COLENT_GOLDEN_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome entropy(std::vector<std::string> args) {
  args.insert(args.begin(), "entropy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = colent::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return colent::read_file(p.string()); }

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("colent_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("sft run on the full 2-shift") {
  const auto r = entropy({"sft", "--matrix", kModels + "/full2.json", "--mode", "coloured",
                          "--n-max", "10"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "label=full2 mode=coloured n_max=10 points=10 slope=0.69314718056 method=tail_max "
        "upper_bound_only=false\n");
}

TEST_CASE("sandwich summary line") {
  const auto r = entropy({"sandwich", "--model", kModels + "/path4.json", "--n", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "N=2 Nc=2 bound=4 OK\n");
  const auto g = entropy({"sandwich", "--model", kModels + "/grid3.json"});
  CHECK(g.code == 0);
  CHECK(g.out == "N=4 Nc=4 bound=12 OK\n");
}

TEST_CASE("understating the dimension is a verdict failure") {
  const auto r = entropy({"sandwich", "--model", kGolden + "/grid3_flat.json"});
  CHECK(r.code == 2);
  CHECK(r.out.find("VIOLATED") != std::string::npos);
}

TEST_CASE("l1 constant of the Rademacher family") {
  const auto r = entropy({"l1", "--family", "rademacher", "--m", "3", "--depth", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("K=1 exact=true infinite=false size=6", 0) == 0);
}

TEST_CASE("golden-mean coloured table matches the golden file") {
  TempDir dir;
  const auto r = entropy({"sft", "--matrix", kModels + "/golden.csv", "--mode", "coloured",
                          "--n-max", "8", "--out", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir.path / "golden_coloured.csv") == slurp(kGolden + "/golden_coloured.csv"));
}

TEST_CASE("combined suite writes one table per mode and one summary") {
  TempDir a, b;
  const std::vector<std::string> args{"sft",     "--matrix", kModels + "/golden.json",
                                      "--mode",  "coloured,cpc,qd",
                                      "--n-max", "12",       "--seed", "7"};
  auto first = args, second = args;
  first.insert(first.end(), {"--out", a.str()});
  second.insert(second.end(), {"--out", b.str()});
  const auto r1 = entropy(first), r2 = entropy(second);
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  std::size_t lines = 0;
  for (char c : r1.out) lines += c == '\n';
  CHECK(lines == 3);
  for (const char* name : {"golden_coloured.csv", "golden_cpc.csv", "golden_qd.csv",
                           "golden_cpc_audit.csv", "golden_qd_audit.csv", "summary.json"}) {
    REQUIRE(fs::exists(a.path / name));
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
  // Every mode reports the same Fibonacci ranks.
  std::istringstream qd(slurp(a.path / "golden_qd.csv"));
  std::string line;
  std::getline(qd, line);
  for (std::size_t n = 1; std::getline(qd, line); ++n) {
    CHECK(line == "golden," + std::to_string(n) + "," +
                      std::to_string(oracle::count_words({{1, 1}, {1, 0}}, n)) + ",true,qd");
  }
}

TEST_CASE("inexact counts are flagged all the way to the tables") {
  TempDir dir;
  const auto r = entropy({"cover", "--model", kGolden + "/arcs12.json", "--n-max", "6",
                          "--exact-threshold", "0", "--out", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("upper_bound_only=true") != std::string::npos);
  const std::string csv = slurp(dir.path / "arcs12_plain.csv");
  CHECK(csv == slurp(kGolden + "/arcs12_plain_upper.csv"));
  CHECK(csv.find(",true,") == std::string::npos);
  const std::string summary = slurp(dir.path / "summary.json");
  CHECK(summary.find("\"upper_bound_only\": true") != std::string::npos);
  CHECK(summary.find("\"all_exact\": false") != std::string::npos);

  // The flagged counts are upper bounds of the exact ones.
  TempDir exact;
  REQUIRE(entropy({"cover", "--model", kGolden + "/arcs12.json", "--n-max", "6", "--out",
                   exact.str()})
              .code == 0);
  std::istringstream up(csv), ex(slurp(exact.path / "arcs12_plain.csv"));
  std::string lu, le;
  std::getline(up, lu);
  std::getline(ex, le);
  while (std::getline(up, lu) && std::getline(ex, le)) {
    const auto count = [](const std::string& row) {
      const auto a = row.find(',', row.find(',') + 1);
      return std::stoull(row.substr(a + 1, row.find(',', a + 1) - a - 1));
    };
    CHECK(count(lu) >= count(le));
    CHECK(le.find(",true,") != std::string::npos);
  }
}

TEST_CASE("an empty series gives a header-only table") {
  TempDir dir;
  const std::string model = R"({"cells": 2, "cover": [[0], [1]], "depth": 0})";
  const auto r = entropy({"cover", "--model", model, "--out", dir.str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("points=0") != std::string::npos);
  CHECK(slurp(dir.path / "inline_plain.csv") == "label,n,count,exact,mode\n");
}

TEST_CASE("json tables") {
  TempDir dir;
  const auto r = entropy({"sft", "--matrix", kModels + "/full2.json", "--n-max", "3",
                          "--format", "json", "--out", dir.str()});
  REQUIRE(r.code == 0);
  const std::string doc = slurp(dir.path / "full2_coloured.json");
  CHECK(doc.find("\"count\": 8") != std::string::npos);
}

TEST_CASE("config documents with flag overrides") {
  TempDir dir;
  fs::create_directories(dir.path);
  const fs::path cfg = dir.path / "run.json";
  std::ofstream(cfg) << R"({"matrix": ")" << kModels << R"(/full3.json", "mode": "plain", "n_max": 4})";
  const auto from_file = entropy({"sft", "--config", cfg.string()});
  CHECK(from_file.code == 0);
  CHECK(from_file.out.find("mode=plain n_max=4") != std::string::npos);
  const auto overridden = entropy({"sft", "--config", cfg.string(), "--n-max", "6"});
  CHECK(overridden.out.find("mode=plain n_max=6") != std::string::npos);

  const colent::cli::ExperimentConfig inline_model = colent::cli::parse_config(
      R"({"model": {"cells": 1, "cover": [[0]]}, "seed": 5})", "inline");
  CHECK(inline_model.model.front() == '{');
  CHECK(inline_model.seed == 5);
}

TEST_CASE("malformed input is a structural error with a location") {
  TempDir dir;
  fs::create_directories(dir.path);
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{\n  \"n_max\": 3,\n  \"mode\": [\"plain\"\n}\n";
  const auto r = entropy({"sft", "--config", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.json:4:") != std::string::npos);

  const fs::path unknown = dir.path / "unknown.json";
  std::ofstream(unknown) << R"({"n_maximum": 3})";
  const auto u = entropy({"sft", "--config", unknown.string()});
  CHECK(u.code == 1);
  CHECK(u.err.find("'n_maximum'") != std::string::npos);

  CHECK(entropy({"sft", "--matrix", "/nonexistent/m.json"}).code == 1);
  CHECK(entropy({"sft", "--matrix", kModels + "/full2.json", "--mode", "bogus"}).code == 1);
  CHECK(entropy({"sft", "--matrix", kModels + "/full2.json", "--epsilon", "0"}).code == 1);
  CHECK(entropy({"frobnicate"}).code == 1);
  CHECK(entropy({}).code == 1);
  CHECK(entropy({"sandwich"}).code == 1);
}

TEST_CASE("permanence suite") {
  const auto r = entropy({"permanence"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const auto two = entropy({"permanence", "--matrix", kModels + "/full2.json", "--matrix",
                            kModels + "/golden.json"});
  CHECK(two.code == 0);
  CHECK(two.out.find("direct_sum full2+golden PASS") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const auto r = entropy({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sandwich") != std::string::npos);
}
