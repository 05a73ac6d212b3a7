#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "evokit/cli.hpp"

using namespace evokit;
namespace fs = std::filesystem;

namespace {

const std::string kSamples = EVOKIT_SAMPLES_DIR;

std::string sample(const std::string& name) { return kSamples + "/" + name; }

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cfg(const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig machine(const std::string& sub, const std::string& input) {
  RunConfig cfg;
  cfg.subcommand = sub;
  cfg.inputs = {input};
  cfg.format = OutputFormat::machine;
  return cfg;
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError("", 0, "");
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("evokit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string str() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

RunResult run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + std::string(EVOKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "", ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

}  // namespace

TEST(Parse, AlgebraAndPermutationDocuments) {
  const auto doc = read_document(sample("e1.json"));
  EXPECT_FALSE(doc.is_permutation());
  EXPECT_EQ(doc.domain(), Domain::rational);
  const auto e = std::get<EvolutionAlgebra<Rational>>(doc.algebra());
  EXPECT_EQ(e.coeff(0, 0), 1);

  const auto p = read_document(sample("perm_complex.json"));
  EXPECT_TRUE(p.is_permutation());
  EXPECT_EQ(p.domain(), Domain::complex);
  const auto& pa = std::get<PermutationAlgebra<Complex>>(std::get<AnyPermutationAlgebra>(p.content));
  EXPECT_EQ(pa.coeffs[1], Complex(1, -1));
  EXPECT_EQ(pa.perm(0), 1u);
}

TEST(Parse, ErrorsNameFieldAndLine) {
  const auto bad_entry = parse_failure(R"({
  "dim": 2,
  "field": "rational",
  "rows": [
    ["1", "0"],
    ["0", "x"]
  ]
})");
  EXPECT_EQ(bad_entry.field(), "rows[1][1]");
  EXPECT_EQ(bad_entry.line(), 6u);
  EXPECT_NE(std::string(bad_entry.what()).find("rows[1][1]"), std::string::npos);

  const auto bad_field = parse_failure(R"({
  "dim": 2,
  "field": "real",
  "rows": [["1", "0"], ["0", "0"]]
})");
  EXPECT_EQ(bad_field.field(), "field");
  EXPECT_EQ(bad_field.line(), 3u);

  const auto missing = parse_failure(R"({"dim": 2, "field": "rational"})");
  EXPECT_EQ(missing.field(), "rows");

  const auto short_row = parse_failure(R"({
  "dim": 2,
  "field": "complex",
  "rows": [
    ["1", "0"],
    ["0"]
  ]
})");
  EXPECT_EQ(short_row.field(), "rows[1]");
  EXPECT_EQ(short_row.line(), 6u);

  const auto numeric = parse_failure(R"({"dim": 1, "field": "rational", "rows": [[1]]})");
  EXPECT_EQ(numeric.field(), "rows[0][0]");

  const auto perm = parse_failure(R"({
  "field": "rational",
  "perm": [1, 1],
  "coeffs": ["1", "2"]
})");
  EXPECT_EQ(perm.field(), "perm");
  EXPECT_EQ(perm.line(), 3u);

  const auto coeffs = parse_failure(R"({
  "field": "rational",
  "perm": [2, 1],
  "coeffs": ["1"]
})");
  EXPECT_EQ(coeffs.field(), "coeffs");
  EXPECT_EQ(coeffs.line(), 4u);
}

TEST(Parse, MalformedJsonReportsLine) {
  const auto e = parse_failure("{\n  \"dim\": 2,\n  \"field\": \"rational\"\n  \"rows\": []\n}");
  EXPECT_EQ(e.line(), 4u);
  EXPECT_THROW(read_document(sample("does_not_exist.json")), ParseError);
}

TEST(Parse, ScalarLists) {
  EXPECT_EQ(parse_scalar_list<Rational>("1/2,3", "--x"), (std::vector<Rational>{Rational(1, 2), Rational(3)}));
  EXPECT_EQ(parse_scalar_list<Complex>("1+2i,-i", "--x"), (std::vector<Complex>{Complex(1, 2), Complex(0, -1)}));
  try {
    parse_scalar_list<Rational>("1,z", "--y");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "--y");
  }
}

TEST(Serialize, RoundTripsDocuments) {
  for (const auto* name : {"e1.json", "e5_complex.json", "w0.json", "perm.json", "perm_complex.json"}) {
    const auto doc = read_document(sample(name));
    const auto first = serialize(doc);
    EXPECT_EQ(serialize(parse_document(first)), first) << name;
  }
}

TEST(Run, SpecExamples) {
  const auto c = run_cfg(machine("classify2", sample("e1.json")));
  EXPECT_EQ(c.code, 0);
  const auto j = Json::parse(c.out);
  EXPECT_EQ(j["result"]["label"], "E1");
  EXPECT_EQ(j["domain"], "rational");
  EXPECT_TRUE(j["residuals"].contains("witness"));

  const auto env = run_cfg(machine("envelope", sample("e6_1.json")));
  EXPECT_EQ(env.code, 0);
  EXPECT_EQ(Json::parse(env.out)["result"]["dim"], 4);

  auto per = machine("period", sample("w0.json"));
  per.depth = 1;
  const auto p = run_cfg(per);
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("depth"), std::string::npos);
}

TEST(Run, EverySubcommandProducesResiduals) {
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"classify2", "e5_complex.json"}, {"perm-normal-form", "perm_complex.json"}, {"nilpotent", "e3.json"},
      {"idempotent", "cyc3.json"},      {"envelope", "rank_m2.json"},             {"period", "w0.json"},
      {"check-3d", "w0.json"},          {"check-3d", "zero_case.json"},           {"nilpotent", "markov.json"}};
  for (const auto& [sub, file] : jobs) {
    const auto r = run_cfg(machine(sub, sample(file)));
    EXPECT_EQ(r.code, 0) << sub << " " << file << "\n" << r.out;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["status"], "ok");
    EXPECT_TRUE(j.contains("residuals")) << sub;
  }
  auto mul = machine("mul", sample("e3.json"));
  mul.x = "1,1";
  mul.y = "1,1";
  const auto m = Json::parse(run_cfg(mul).out);
  EXPECT_EQ(m["result"]["product"], Json::array({"0", "0"}));

  auto pl = machine("plenary", sample("cyc3.json"));
  pl.x = "1,0,0";
  pl.k = 3;
  EXPECT_EQ(Json::parse(run_cfg(pl).out)["result"]["power"], Json::array({"0", "0", "1"}));
}

TEST(Run, ReportContents) {
  const auto nf = Json::parse(run_cfg(machine("perm-normal-form", sample("perm.json"))).out);
  EXPECT_EQ(nf["result"]["components"], Json::array({"CYC_2", "NIL_2"}));
  const auto w0 = Json::parse(run_cfg(machine("check-3d", sample("w0.json"))).out);
  EXPECT_EQ(w0["result"]["equivalence"]["verdict"], "agree");
  EXPECT_TRUE(w0["result"]["recurrences"]["all_pass"].get<bool>());
  const auto z = Json::parse(run_cfg(machine("check-3d", sample("zero_case.json"))).out);
  EXPECT_EQ(z["result"]["zero_case"]["case"], 1);
  const auto idem = Json::parse(run_cfg(machine("idempotent", sample("cyc3.json"))).out);
  EXPECT_EQ(idem["result"]["count"], 7);
  EXPECT_EQ(idem["result"]["method"], "closed-form");
  const auto env = Json::parse(run_cfg(machine("envelope", sample("rank_m2.json"))).out);
  EXPECT_EQ(env["result"]["rank_case"]["label"], "M2");
}

TEST(Run, ExitCodes) {
  TempDir dir;
  const auto bad = dir.write("bad.json", "{\n  \"dim\": 2,\n  \"field\": \"rational\",\n  \"rows\": [[\"1\", \"q\"], [\"0\", \"0\"]]\n}");
  const auto r = run_cfg(machine("classify2", bad));
  EXPECT_EQ(r.code, 1);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["error"]["field"], "rows[0][1]");
  EXPECT_EQ(j["error"]["line"], 4);

  EXPECT_EQ(run_cfg(machine("classify2", sample("w0.json"))).code, 2);
  EXPECT_EQ(run_cfg(machine("check-3d", sample("e1.json"))).code, 2);
  EXPECT_EQ(run_cfg(machine("perm-normal-form", sample("e1.json"))).code, 2);
  EXPECT_EQ(run_cfg(machine("mul", sample("e1.json"))).code, 2);
  auto tol = machine("classify2", sample("e1.json"));
  tol.tol = 0;
  EXPECT_EQ(run_cfg(tol).code, 2);
  EXPECT_EQ(run_cfg(machine("frobnicate", sample("e1.json"))).code, 2);
  // diagonal not zero is a reported precondition failure
  const auto diag = Json::parse(run_cfg(machine("check-3d", sample("rank_m2.json"))).out);
  EXPECT_EQ(diag["status"], "precondition_failed");
}

TEST(Run, MachineOutputRoundTripsByteIdentical) {
  for (const auto* sub : {"classify2", "envelope", "nilpotent", "idempotent", "period"}) {
    const auto r = run_cfg(machine(sub, sample("e5_complex.json")));
    EXPECT_EQ(Json::parse(r.out).dump(2) + "\n", r.out) << sub;
  }
  const auto r = run_cfg(machine("check-3d", sample("w0.json")));
  EXPECT_EQ(Json::parse(r.out).dump(2) + "\n", r.out);
}

TEST(Run, DeterministicForFixedSeed) {
  auto cfg = machine("idempotent", sample("e5_complex.json"));
  cfg.seed = 9;
  cfg.attempts = 50;
  EXPECT_EQ(run_cfg(cfg).out, run_cfg(cfg).out);
  const auto c = machine("classify2", sample("e5_complex.json"));
  EXPECT_EQ(run_cfg(c).out, run_cfg(c).out);
}

TEST(Run, BatchDirectory) {
  TempDir dir;
  dir.write("a.json", R"({"dim": 2, "field": "rational", "rows": [["1","0"],["0","0"]]})");
  dir.write("b.json", R"({"dim": 2, "field": "rational", "rows": [["0","1"],["1","1"]]})");
  dir.write("c.json", R"({"dim": 2, "field": "rational", "rows": [["0","1"],["1"]]})");
  dir.write("ignored.txt", "not json");
  RunConfig cfg;
  cfg.subcommand = "classify2";
  cfg.batch_dir = dir.str();
  cfg.format = OutputFormat::machine;
  const auto r = run_cfg(cfg);
  EXPECT_EQ(r.code, 1);
  const auto j = Json::parse(r.out);
  ASSERT_EQ(j["reports"].size(), 3u);
  EXPECT_EQ(j["reports"][0]["result"]["label"], "E1");
  EXPECT_EQ(j["reports"][1]["result"]["variant"], "E6");
  EXPECT_EQ(j["reports"][2]["exit_code"], 1);
  EXPECT_EQ(j["exit_code"], 1);
}

TEST(Run, TextFormat) {
  RunConfig cfg;
  cfg.subcommand = "classify2";
  cfg.inputs = {sample("e3.json")};
  const auto r = run_cfg(cfg);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("label: E3"), std::string::npos);
}

TEST(Run, BitCapFromConfig) {
  TempDir dir;
  const auto f = dir.write("grow.json", R"({"dim": 2, "field": "rational", "rows": [["3/7","5/11"],["2/13","1/3"]]})");
  auto cfg = machine("period", f);
  cfg.depth = 30;
  cfg.bit_cap = 2000;
  const auto j = Json::parse(run_cfg(cfg).out);
  EXPECT_EQ(j["result"]["bit_cap"], 2000);
  EXPECT_TRUE(j["result"]["reports"][0]["partial"].get<bool>());
}

TEST(Binary, RunsExamples) {
  const auto c = run_binary("classify2 --format machine " + sample("e1.json"));
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(Json::parse(c.out)["result"]["label"], "E1");
  const auto env = run_binary("envelope --format machine " + sample("e6_1.json"));
  EXPECT_EQ(Json::parse(env.out)["result"]["dim"], 4);
  EXPECT_EQ(run_binary("period --depth 1 " + sample("w0.json")).code, 2);
  EXPECT_EQ(run_binary("period --bogus-flag " + sample("w0.json")).code, 1);
  const auto nf = run_binary("perm-normal-form --format machine --seed 3 " + sample("perm.json"));
  EXPECT_EQ(nf.code, 0);
  const auto batch = run_binary("nilpotent --format machine --batch " + kSamples);
  EXPECT_EQ(batch.code, 0);
  const auto reports = Json::parse(batch.out)["reports"];
  EXPECT_EQ(reports.size(), 11u);
  for (const auto& r : reports) EXPECT_EQ(r["status"], "ok") << r["input"];
  EXPECT_EQ(run_binary("check-3d --batch " + kSamples).code, 2);
}

TEST(Binary, EnvironmentBitCap) {
  TempDir dir;
  const auto f = dir.write("grow.json", R"({"dim": 2, "field": "rational", "rows": [["3/7","5/11"],["2/13","1/3"]]})");
  const auto plain = Json::parse(run_binary("period --format machine --depth 12 " + f).out);
  EXPECT_EQ(plain["result"]["bit_cap"], 1000000);
  EXPECT_FALSE(plain["result"]["reports"][0]["partial"].get<bool>());
  const auto capped = Json::parse(run_binary("period --format machine --depth 30 " + f, "EVOKIT_BITCAP=1500 ").out);
  EXPECT_EQ(capped["result"]["bit_cap"], 1500);
  EXPECT_TRUE(capped["result"]["reports"][0]["partial"].get<bool>());
  EXPECT_EQ(run_binary("period " + f, "EVOKIT_BITCAP=abc ").code, 1);
}
