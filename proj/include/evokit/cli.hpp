#pragma once

// Command-line driver: one report per input file, as text or as a single JSON object.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evokit/classify2.hpp"
#include "evokit/enveloping.hpp"
#include "evokit/io.hpp"
#include "evokit/period.hpp"
#include "evokit/permutation.hpp"
#include "evokit/special.hpp"

namespace evokit {

enum class OutputFormat { text, machine };

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::optional<std::string> batch_dir;
  double tol = kDefaultTol;
  std::size_t depth = kDefaultDepth;
  std::uint64_t seed = 1;
  std::size_t attempts = 200;
  OutputFormat format = OutputFormat::text;
  std::optional<std::string> x, y;   // mul / plenary operands
  std::size_t k = 2;                 // plenary index
  std::size_t index = 0;             // period generator (1-based), 0 = all
  std::optional<std::size_t> bit_cap;  // falls back to EVOKIT_BITCAP, then the default
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"mul",      "plenary",  "classify2", "perm-normal-form", "nilpotent",
                                              "idempotent", "envelope", "period",    "check-3d"};
  return names;
}

namespace detail {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitPrecondition = 2;

inline std::size_t effective_bit_cap(const RunConfig& cfg) {
  if (cfg.bit_cap) return *cfg.bit_cap;
  if (const char* env = std::getenv("EVOKIT_BITCAP")) {
    const std::string s(env);
    if (!is_integer_literal(s) || s.size() > 18) throw ParseError("EVOKIT_BITCAP", 0, "expected a positive integer");
    const auto v = std::stoull(s);
    if (v == 0) throw ParseError("EVOKIT_BITCAP", 0, "expected a positive integer");
    return static_cast<std::size_t>(v);
  }
  return kDefaultBitCap;
}

template <std::size_t N>
Json identity_json(const IdentityCheck<N>& c) {
  Json j{{"holds", Json::array()}, {"residuals", Json::array()}, {"all", c.all()}};
  for (std::size_t i = 0; i < N; ++i) {
    j["holds"].push_back(c.holds[i]);
    j["residuals"].push_back(c.residuals[i]);
  }
  return j;
}

template <std::size_t N>
double max_residual(const IdentityCheck<N>& c) {
  double m = 0.0;
  for (double r : c.residuals) m = std::max(m, r);
  return m;
}

struct Outcome {
  Json result = Json::object();
  Json residuals = Json::object();
};

class Runner {
 public:
  Runner(const RunConfig& cfg, const InputDocument& doc) : cfg_(cfg), doc_(doc) {}

  Outcome run() {
    const auto& c = cfg_.subcommand;
    if (c == "perm-normal-form") return perm_normal_form();
    return std::visit([&](const auto& e) { return dispatch(e); }, doc_.algebra());
  }

 private:
  template <Field T>
  Outcome dispatch(const EvolutionAlgebra<T>& e) {
    const auto& c = cfg_.subcommand;
    if (c == "mul") return mul(e);
    if (c == "plenary") return plenary(e);
    if (c == "classify2") return classify2(e);
    if (c == "nilpotent") return nilpotent(e);
    if (c == "idempotent") return idempotent(e);
    if (c == "envelope") return envelope(e);
    if (c == "period") return period(e);
    if (c == "check-3d") return check3d(e);
    throw PreconditionFailed("unknown subcommand '" + c + "'");
  }

  template <Field T>
  Element<T> operand(const EvolutionAlgebra<T>& e, const std::optional<std::string>& text, const std::string& flag) {
    if (!text) throw PreconditionFailed(cfg_.subcommand + " needs " + flag);
    auto coords = parse_scalar_list<T>(*text, flag);
    if (coords.size() != e.dim())
      throw PreconditionFailed(flag + " has " + std::to_string(coords.size()) + " coordinates, algebra has dimension " +
                               std::to_string(e.dim()));
    return Element<T>(std::move(coords));
  }

  template <Field T>
  Outcome mul(const EvolutionAlgebra<T>& e) {
    const auto x = operand(e, cfg_.x, "--x");
    const auto y = operand(e, cfg_.y, "--y");
    const auto xy = multiply(e, x, y);
    Outcome o;
    o.result = {{"x", to_json(x.coords)}, {"y", to_json(y.coords)}, {"product", to_json(xy.coords)}};
    o.residuals["commutativity"] = (xy - multiply(e, y, x)).norm_inf();
    return o;
  }

  template <Field T>
  Outcome plenary(const EvolutionAlgebra<T>& e) {
    const auto x = operand(e, cfg_.x, "--x");
    if (cfg_.k < 1) throw PreconditionFailed("--k must be >= 1");
    Outcome o;
    o.result = {{"x", to_json(x.coords)}, {"k", cfg_.k}, {"power", to_json(plenary_power(e, x, cfg_.k).coords)}};
    return o;
  }

  template <Field T>
  Outcome classify2(const EvolutionAlgebra<T>& e) {
    if (e.dim() != 2) throw PreconditionFailed("classify2 needs a 2-dimensional algebra");
    const auto c = classify_2d(e, cfg_.tol);
    const auto inv = invariants_2d(e, cfg_.tol);
    Outcome o;
    o.result = {{"label", c.label.str()},
                {"variant", to_string(c.label.variant)},
                {"params", to_json(c.label.params)},
                {"square_dim", c.square_dim},
                {"exact_decision", c.exact_decision},
                {"witness", to_json(c.witness.forward)},
                {"invariants",
                 {{"annihilator_dim", inv.annihilator_dim},
                  {"has_nonzero_idempotent", inv.has_nonzero_idempotent},
                  {"has_nonzero_nilpotent", inv.has_nonzero_nilpotent},
                  {"e_times_square_nonzero", inv.e_times_square_nonzero},
                  {"square_times_square_zero", inv.square_times_square_zero}}}};
    o.residuals = {{"witness", c.residual}, {"witness_inverse", c.witness.residual}};
    return o;
  }

  Outcome perm_normal_form() {
    if (!doc_.is_permutation()) throw PreconditionFailed("perm-normal-form needs a perm/coeffs input");
    return std::visit(
        [&](const auto& p) {
          const auto nf = normal_form(p);
          Outcome o;
          Json comps = Json::array(), blocks = Json::array();
          for (const auto& c : nf.components) comps.push_back(c.label());
          for (const auto& b : nf.blocks) {
            std::vector<std::size_t> idx;
            for (auto i : b.indices) idx.push_back(i + 1);
            blocks.push_back({{"component", b.component.label()}, {"indices", idx}});
          }
          o.result = {{"components", comps},
                      {"blocks", blocks},
                      {"exact", nf.exact},
                      {"cycles", cycle_decomposition(p.perm).str()},
                      {"witness", std::visit([](const auto& cb) { return to_json(cb); }, nf.witness)}};
          o.residuals = {{"witness", nf.residual}};
          return o;
        },
        std::get<AnyPermutationAlgebra>(doc_.content));
  }

  template <Field T>
  Outcome nilpotent(const EvolutionAlgebra<T>& e) {
    const auto r = absolute_nilpotent(e, cfg_.tol);
    Outcome o;
    o.result = {{"exists_nontrivial", r.exists_nontrivial},
                {"witness", r.witness ? to_json(r.witness->coords) : Json(nullptr)},
                {"markov", is_markov(e)}};
    if constexpr (field_traits<T>::exact) {
      if (is_markov(e)) o.result["markov_real_only_trivial"] = markov_real_nilpotent_check(e, cfg_.seed);
    }
    o.residuals = {{"witness", r.verification_residual}};
    return o;
  }

  template <Field T>
  Outcome idempotent(const EvolutionAlgebra<T>& e) {
    IdempotentSet set;
    bool is_cyc = false;
    if constexpr (field_traits<T>::exact) is_cyc = e.dim() <= 20 && e == cyc_algebra(e.dim());
    const auto ec = to_complex(e);
    if (is_cyc)
      set = idempotents_cyc(e.dim());
    else
      set = idempotents_numeric(ec, cfg_.attempts, cfg_.seed);
    Outcome o;
    Json elems = Json::array();
    double worst = 0.0;
    for (const auto& x : set.elements) {
      elems.push_back(to_json(x.coords));
      worst = std::max(worst, (square(ec, x) - x).norm_inf());
    }
    o.result = {{"method", to_string(set.method)}, {"count", set.elements.size()}, {"elements", elems}};
    o.residuals = {{"max_idempotent", worst}};
    return o;
  }

  template <Field T>
  Outcome envelope(const EvolutionAlgebra<T>& e) {
    const auto r = enveloping_closure(e, cfg_.tol);
    const auto rc = classify_rank_cases(e, cfg_.tol);
    Outcome o;
    Json basis = Json::array();
    for (const auto& b : r.basis) basis.push_back(to_json(b));
    o.result = {{"dim", r.dim},
                {"per_row_ranks", r.per_row_ranks},
                {"sum_ranks", r.sum_ranks},
                {"formula_agrees", r.formula_agrees},
                {"basis", basis},
                {"rank_case", {{"label", to_string(rc.label)}, {"s", rc.s}, {"premise", rc.premise_report}}}};
    o.residuals = {{"closure", r.closure_residual}, {"rank_case", rc.residual}};
    return o;
  }

  template <Field T>
  Outcome period(const EvolutionAlgebra<T>& e) {
    if (cfg_.index > e.dim()) throw PreconditionFailed("--index exceeds the dimension");
    const std::size_t cap = effective_bit_cap(cfg_);
    Json reports = Json::array();
    for (std::size_t j = 0; j < e.dim(); ++j) {
      if (cfg_.index != 0 && j + 1 != cfg_.index) continue;
      const auto r = recurrence_report(e, j, cfg_.depth, cap);
      reports.push_back({{"generator", j + 1},
                         {"recurrence_set", r.recurrence_set},
                         {"infinite_up_to_depth", r.infinite_up_to_depth},
                         {"partial", r.partial},
                         {"depth_reached", r.depth_reached}});
    }
    Outcome o;
    o.result = {{"depth", cfg_.depth}, {"bit_cap", cap}, {"reports", reports}};
    return o;
  }

  template <Field T>
  Outcome check3d(const EvolutionAlgebra<T>& e) {
    if (e.dim() != 3) throw PreconditionFailed("check-3d needs a 3-dimensional algebra");
    const auto c = ThreeDimCoefficients<T>::from_algebra(e);
    const auto cube = check_cube_conditions(c);  // throws DiagonalNotZero
    const auto fourth = check_fourth_conditions(c);
    const auto derived = check_derived_identities(c);
    Outcome o;
    o.result = {{"cube_conditions", identity_json(cube)},
                {"fourth_conditions", identity_json(fourth)},
                {"derived_identities", identity_json(derived)},
                {"all_off_diagonal_nonzero", c.all_off_diagonal_nonzero()}};
    o.residuals = {{"cube_conditions", max_residual(cube)},
                   {"fourth_conditions", max_residual(fourth)},
                   {"derived_identities", max_residual(derived)}};
    if (!c.all_off_diagonal_nonzero()) {
      try {
        const auto z = classify_3d_zero_case(c);
        std::vector<std::size_t> relabel;
        for (auto i : z.relabel) relabel.push_back(i + 1);
        o.result["zero_case"] = {{"applicable", true},
                                 {"case", z.proof_case},
                                 {"relabel", relabel},
                                 {"a2", to_json(z.a2)},
                                 {"a3", to_json(z.a3)},
                                 {"b3", to_json(z.b3)},
                                 {"witness", to_json(z.witness.forward)}};
        o.residuals["zero_case_witness"] = z.residual;
      } catch (const PreconditionFailed& err) {
        o.result["zero_case"] = {{"applicable", false}, {"reason", err.what()}};
      }
    } else {
      const auto eq = infinite_period_equivalence_test(c, cfg_.depth, effective_bit_cap(cfg_));
      o.result["equivalence"] = {{"verdict", to_string(eq.verdict)},
                                 {"cube_conditions", eq.cube_conditions},
                                 {"infinite_up_to_depth", eq.infinite_up_to_depth},
                                 {"partial", eq.partial}};
      const auto states = verify_recurrences(c, cfg_.depth);
      Json first_failure = nullptr;
      double worst = 0.0;
      for (const auto& s : states) {
        worst = std::max(worst, s.plenary_residual);
        if (!s.pass() && first_failure.is_null()) first_failure = s.k;
      }
      o.result["recurrences"] = {{"states", states.size()}, {"all_pass", first_failure.is_null()},
                                 {"first_failure", first_failure}};
      o.residuals["recurrences"] = worst;
    }
    return o;
  }

  const RunConfig& cfg_;
  const InputDocument& doc_;
};

inline void render_text(const Json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_object() && !v.empty()) {
      out << pad << it.key() << ":\n";
      render_text(v, out, indent + 2);
    } else if (v.is_string()) {
      out << pad << it.key() << ": " << v.get<std::string>() << "\n";
    } else {
      out << pad << it.key() << ": " << v.dump() << "\n";
    }
  }
}

inline Json error_json(const Error& e) {
  Json j{{"message", e.what()}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["field"] = p->field();
    j["line"] = p->line();
  }
  return j;
}

/// Runs one input file; returns the report object and the exit code.
inline std::pair<Json, int> run_one(const RunConfig& cfg, const std::string& path) {
  Json report{{"command", cfg.subcommand}, {"input", path}};
  try {
    const auto doc = read_document(path);
    report["domain"] = to_string(doc.domain());
    Runner runner(cfg, doc);
    auto outcome = runner.run();
    report["status"] = "ok";
    report["result"] = std::move(outcome.result);
    report["residuals"] = std::move(outcome.residuals);
    report["exit_code"] = kExitOk;
    return {report, kExitOk};
  } catch (const ParseError& e) {
    report["status"] = "parse_error";
    report["error"] = error_json(e);
    report["exit_code"] = kExitParse;
    return {report, kExitParse};
  } catch (const Error& e) {
    report["status"] = "precondition_failed";
    report["error"] = error_json(e);
    report["exit_code"] = kExitPrecondition;
    return {report, kExitPrecondition};
  }
}

}  // namespace detail

/// Executes the configured subcommand on every input (or every *.json file of the batch
/// directory, in name order). Exit code: 0 ok, 1 parse error, 2 precondition failure;
/// with several inputs the largest code wins.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto fail_config = [&](const std::string& msg) {
    if (cfg.format == OutputFormat::machine) {
      Json j{{"command", cfg.subcommand}, {"status", "precondition_failed"}, {"exit_code", detail::kExitPrecondition},
             {"error", {{"message", msg}}}};
      out << j.dump(2) << "\n";
    } else {
      err << "error: " << msg << "\n";
    }
    return detail::kExitPrecondition;
  };
  if (std::find(subcommands().begin(), subcommands().end(), cfg.subcommand) == subcommands().end())
    return fail_config("unknown subcommand '" + cfg.subcommand + "'");
  if (!(cfg.tol > 0.0)) return fail_config("--tol must be positive");
  if (cfg.depth < 2) return fail_config("--depth K must be >= 2");

  std::vector<std::string> inputs = cfg.inputs;
  if (cfg.batch_dir) {
    std::error_code ec;
    std::vector<std::string> found;
    for (const auto& entry : std::filesystem::directory_iterator(*cfg.batch_dir, ec))
      if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path().string());
    if (ec) return fail_config("cannot read batch directory '" + *cfg.batch_dir + "'");
    std::sort(found.begin(), found.end());
    inputs.insert(inputs.end(), found.begin(), found.end());
  }
  if (inputs.empty()) return fail_config("no input file");

  int code = detail::kExitOk;
  std::vector<Json> reports;
  for (const auto& path : inputs) {
    auto [report, c] = detail::run_one(cfg, path);
    code = std::max(code, c);
    reports.push_back(std::move(report));
  }

  if (cfg.format == OutputFormat::machine) {
    Json top = reports.size() == 1 && !cfg.batch_dir ? reports.front()
                                                      : Json{{"command", cfg.subcommand},
                                                             {"exit_code", code},
                                                             {"reports", reports}};
    out << top.dump(2) << "\n";
  } else {
    for (const auto& r : reports) {
      out << "== " << r.value("input", "") << " ==\n";
      detail::render_text(r, out, 0);
      if (r.contains("error")) err << r.value("input", "") << ": " << r["error"]["message"].get<std::string>() << "\n";
    }
  }
  return code;
}

}  // namespace evokit
