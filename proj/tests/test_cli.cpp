#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
  const std::string cmd = std::string(TROLINK_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

const char* kDiagonal = R"({
  "dim_k": 2, "dim_h": 2,
  "T_basis": [
    [[[1,0],[0,0]],[[0,0],[0,0]]],
    [[[0,0],[1,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[1,0],[0,0]]],
    [[[0,0],[0,0]],[[0,0],[1,0]]]
  ],
  "X_basis": [
    [[[1,0],[0,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[0,0],[1,0]]]
  ],
  "P_coeffs": [
    [[1,0],[0,0],[0,0],[0,0]],
    [[0,0],[0,0],[0,0],[1,0]]
  ]
})";

// Small probes keep the suite fast; the defaults are exercised once below.
const std::string kQuick = " --restarts 8 --amp-level 2";

}  // namespace

TEST_CASE("extend on the diagonal-part instance prints the 8-position mask") {
  write_file("cli_diagonal.json", kDiagonal);
  const Run r = cli("extend cli_diagonal.json --out cli_diagonal_report.json" + kQuick);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "8 positions: (0,0) (2,0) (1,1) (3,1) (0,2) (2,2) (1,3) (3,3)"));
  CHECK(contains(r.out, "verdict: PASS"));

  const auto doc = nlohmann::json::parse(read_file("cli_diagonal_report.json"));
  CHECK(doc["tool"] == "trolink");
  CHECK(doc["command"] == "extend");
  CHECK(doc["verdict"] == "PASS");
  CHECK(doc["failed_gate"] == "");
  CHECK(doc["result"]["mask_positions"].size() == 8);
  CHECK(doc["result"].contains("E_blocks"));
  CHECK(doc["input_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(doc["checks"].size() > 10);
  for (const auto& c : doc["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c["residual"].get<double>() >= 0.0);
  }
}

TEST_CASE("check-subtro on the span{E11} file fails at check (1)") {
  REQUIRE(cli("gen --family degenerate --kind missing_nondegeneracy --seed 0 "
              "--out cli_e11.json").code == 0);
  const Run r = cli("check-subtro cli_e11.json");
  CHECK(r.code == 1);
  CHECK(contains(r.out, "verdict: FAIL (first failure: (1) <XT*T>=T)"));
}

TEST_CASE("gen corner seed 7 round-trips through verify") {
  const Run g = cli("gen --family corner --m 2 --n 2 --seed 7 --out cli_corner7.json");
  REQUIRE(g.code == 0);
  const std::string first = read_file("cli_corner7.json");
  REQUIRE(cli("gen --family corner --m 2 --n 2 --seed 7 --out cli_corner7b.json").code == 0);
  CHECK(read_file("cli_corner7b.json") == first);
  // Default flags: level 4, 200 restarts.
  const Run v = cli("verify cli_corner7.json");
  CHECK(v.code == 0);
  CHECK(contains(v.out, "contractive[L=4]"));
}

TEST_CASE("gen writes to stdout without --out") {
  const Run g = cli("gen --family group_average --m 2 --n 2 --order 2 --seed 3");
  CHECK(g.code == 0);
  const auto j = nlohmann::json::parse(g.out);
  CHECK(j["dim_k"] == 2);
  CHECK(j.contains("P_coeffs"));
}

TEST_CASE("reports are deterministic") {
  REQUIRE(cli("gen --family random --seed 12 --out cli_random12.json").code == 0);
  const Run a = cli("extend cli_random12.json --out cli_r1.json" + kQuick);
  const Run b = cli("extend cli_random12.json --out cli_r2.json" + kQuick);
  CHECK(a.out == b.out);
  CHECK(read_file("cli_r1.json") == read_file("cli_r2.json"));
}

TEST_CASE("each degenerate kind is rejected with exit 1 and a named check") {
  const std::pair<const char*, const char*> kinds[] = {
      {"missing_nondegeneracy", "nondegeneracy"},
      {"noncontractive_P", "tro_expectation"},
      {"non_tro_X", "X_is_tro"}};
  for (const auto& [kind, gate] : kinds) {
    CAPTURE(kind);
    const std::string file = std::string("cli_") + kind + ".json";
    REQUIRE(cli(std::string("gen --family degenerate --kind ") + kind +
                " --seed 5 --out " + file).code == 0);
    const Run r = cli("extend " + file + kQuick);
    CHECK(r.code == 1);
    CHECK(contains(r.out, std::string("rejected at gate: ") + gate));
    CHECK(contains(r.out, std::string("first failure: ") + gate + ": "));
  }
}

TEST_CASE("every command runs on a valid instance") {
  REQUIRE(cli("gen --family corner --m 2 --n 3 --seed 2 --out cli_full.json").code == 0);
  for (const char* cmd : {"check-tro", "closure", "linking", "check-subtro",
                          "check-projection", "extend", "verify", "wstar"}) {
    CAPTURE(cmd);
    const Run r = cli(std::string(cmd) + " cli_full.json" + kQuick);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
  }
}

TEST_CASE("uniqueness compares E_blocks with the assembled expectation") {
  // extend writes E_blocks; splice them into the instance and re-check.
  write_file("cli_diagonal.json", kDiagonal);
  REQUIRE(cli("extend cli_diagonal.json --out cli_ext.json" + kQuick).code == 0);
  auto inst = nlohmann::ordered_json::parse(kDiagonal);
  inst["E_blocks"] = nlohmann::ordered_json::parse(read_file("cli_ext.json"))["result"]["E_blocks"];
  write_file("cli_with_e.json", inst.dump());
  const Run u = cli("uniqueness cli_with_e.json");
  CHECK(u.code == 0);
  CHECK(contains(u.out, "E' = E blockwise"));
  const Run v = cli("verify cli_with_e.json" + kQuick);
  CHECK(v.code == 0);

  // The identity on A_T has e12 = 1, not P: the precondition fails.
  inst["E_blocks"]["e12"] = nlohmann::ordered_json::parse(
      "[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]");
  write_file("cli_bad_e.json", inst.dump());
  const Run bad = cli("uniqueness cli_bad_e.json");
  CHECK(bad.code == 1);
  CHECK(contains(bad.out, "precondition"));
}

TEST_CASE("invalid input exits 2 with a field diagnostic") {
  write_file("cli_broken.json", R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[1]]]})");
  const Run r = cli("check-tro cli_broken.json");
  CHECK(r.code == 2);
  CHECK(contains(r.out, "T_basis[0][0][0]: expected [re, im]"));

  const Run missing = cli("check-tro does_not_exist.json");
  CHECK(missing.code == 2);
  CHECK(contains(missing.out, "cannot open"));

  write_file("cli_diagonal.json", kDiagonal);
  const Run nop = cli("uniqueness cli_diagonal.json");
  CHECK(nop.code == 2);
  CHECK(contains(nop.out, "E_blocks"));

  CHECK(cli("frobnicate x.json").code == 2);
  CHECK(cli("check-tro cli_diagonal.json --amp-level 0").code == 2);
  CHECK(cli("gen --family nope").code == 2);
}

TEST_CASE("version and help") {
  const Run v = cli("--version");
  CHECK(v.code == 0);
  CHECK(contains(v.out, "0.1.0"));
  const Run h = cli("--help");
  CHECK(h.code == 0);
  CHECK(contains(h.out, "check-projection"));
}
