#include "trolink/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "trolink/expectation.hpp"
#include "trolink/gen.hpp"
#include "trolink/instance_io.hpp"
#include "trolink/pipeline.hpp"
#include "trolink/wstar.hpp"

namespace trolink::cli {
namespace {

using io::Json;

struct Flags {
  std::string input;
  std::string out;
  std::optional<double> tol_residual;
  std::optional<double> tol_rank;
  int amp_level = 4;
  int restarts = 200;
  std::optional<std::uint64_t> seed;
  // gen
  std::string family = "corner";
  Index m = 2;
  Index n = 2;
  std::optional<Index> rank_e;
  std::optional<Index> rank_f;
  int order = 2;
  std::string kind = "missing_nondegeneracy";
  Index max_dim = 4;
};

// Everything a command produces.
struct Outcome {
  Report report;
  Json result = Json::object();
  std::string failed_gate;
};

struct Context {
  Flags flags;
  io::InstanceFile file;
  ToleranceProfile tol;
  std::uint64_t seed = 0;
  std::string digest;
};

const std::vector<std::string> kCommands = {
    "check-tro", "closure", "linking",     "check-subtro", "check-projection",
    "extend",    "verify",  "uniqueness", "wstar",         "gen"};

Json report_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks()) {
    checks.push_back(Json{{"name", c.name},
                          {"pass", c.pass},
                          {"residual", c.residual},
                          {"details", c.details},
                          {"mandatory", c.mandatory}});
  }
  return checks;
}

PipelineOptions pipeline_options(const Context& ctx) {
  PipelineOptions o;
  o.amplification_level = ctx.flags.amp_level;
  o.seed = ctx.seed;
  o.probe.samples = ctx.flags.restarts;
  return o;
}

const TroMap& require_p(const io::Loaded& l) {
  if (!l.p) throw InvalidInput("P_coeffs: missing (required by this command)");
  return *l.p;
}

// Runs the three structural gates; returns false if one failed.
bool structure_gates(const io::Loaded& l, const TroMap* p, const Context& ctx,
                     Outcome& o) {
  PipelineOptions opts = pipeline_options(ctx);
  opts.last_gate = "X_subspace_of_T";
  // P is not looked at by the first three gates.
  const TroMap id = TroMap::identity(l.t.space());
  PipelineResult r = run_pipeline(l.t, l.x, p ? *p : id, opts);
  o.report.append(r.report);
  o.failed_gate = r.failed_gate;
  return r.passed();
}

// Records positions (row, col) of M_{m+n} kept by E when E is a 0/1 mask.
void describe_mask(const expectation::BlockExpectation& e, Outcome& o) {
  const ComplexMatrix op = e.vec_operator();
  const Index d = e.dim_k + e.dim_h;
  const ComplexMatrix diag = op.diagonal().asDiagonal();
  double off = (op - diag).norm();
  double frac = 0.0;
  Json positions = Json::array();
  std::ostringstream listing;
  for (Index k = 0; k < op.rows(); ++k) {
    const Complex v = op(k, k);
    const double to_bit = std::min(std::abs(v), std::abs(v - 1.0));
    frac = std::max(frac, to_bit);
    if (std::abs(v - 1.0) < 0.5) {
      const Index row = k % d;
      const Index col = k / d;
      positions.push_back(Json::array({row, col}));
      listing << " (" << row << "," << col << ")";
    }
  }
  const double r = std::max(off, frac);
  const bool mask = r <= 1e-12;
  o.report.add("E is an entrywise mask", mask, r,
               mask ? std::to_string(positions.size()) + " positions:" + listing.str()
                    : std::string("not a mask"),
               false);
  if (mask) o.result["mask_positions"] = positions;
}

Json expectation_json(const expectation::BlockExpectation& e,
                      const io::InstanceFile& f) {
  const io::EBlocks b = io::e_blocks_of(e, f.t_basis, f.x_basis);
  return Json{{"e11", io::matrix_to_json(b.e11)},
              {"e12", io::matrix_to_json(b.e12)},
              {"e21", io::matrix_to_json(b.e21)},
              {"e22", io::matrix_to_json(b.e22)}};
}

// --------------------------------------------------------------------------

Outcome cmd_check_tro(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  Outcome o;
  const auto c = tro::is_tro(l.t.space());
  o.report.add("T T* T in T", c.ok, c.worst_residual,
               "dim T=" + std::to_string(l.t.dim()));
  o.result["dim_T"] = l.t.dim();
  return o;
}

Outcome cmd_closure(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  Outcome o;
  const tro::Tro c = tro::ternary_closure(l.t.space());
  const auto check = tro::is_tro(c.space());
  o.report.add("closure is a TRO", check.ok, check.worst_residual,
               "dim span=" + std::to_string(l.t.dim()) +
                   " dim closure=" + std::to_string(c.dim()));
  const double contains = mats::containment_residual(c.space(), l.t.space());
  o.report.add("closure contains the input", contains <= ctx.tol.residual,
               contains);
  Json basis = Json::array();
  for (const auto& e : c.space().elements()) basis.push_back(io::matrix_to_json(e));
  o.result["dim_closure"] = c.dim();
  o.result["closure_basis"] = basis;
  return o;
}

Outcome cmd_linking(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  Outcome o;
  const auto c = tro::is_tro(l.t.space());
  o.report.add("T T* T in T", c.ok, c.worst_residual);
  if (!c.ok) return o;
  const auto blocks = tro::linking_blocks(l.t);
  const auto at = tro::linking_algebra(l.t, blocks);
  auto add = [&](const std::string& name, const mats::SubspaceBasis& s) {
    const auto chk = mats::star_algebra_check(s);
    o.report.add(name + " is a *-algebra", chk.ok, chk.residual,
                 "dim=" + std::to_string(s.dim()));
  };
  add("<TT*>", blocks.left);
  add("<T*T>", blocks.right);
  add("A_T", at.space);
  o.result["dim_left"] = blocks.left.dim();
  o.result["dim_right"] = blocks.right.dim();
  o.result["dim_linking"] = at.space.dim();
  o.result["nondegenerately_represented"] = tro::nondegenerately_represented(l.t);
  return o;
}

Outcome cmd_check_subtro(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  Outcome o;
  if (!structure_gates(l, nullptr, ctx, o)) return o;
  const auto s = tro::subtro_nondegeneracy(l.x, l.t);
  for (std::size_t i = 0; i < s.checks.size(); ++i) {
    const auto& c = s.checks[i];
    o.report.add("(" + std::to_string(i + 1) + ") " + c.name, c.pass, c.residual,
                 i < 2 ? "" : "derived", i < 2);
  }
  const bool linking = tro::linking_subalgebra_nondegenerate(l.x, l.t);
  o.report.add("A_X nondegenerate in A_T", linking, linking ? 0.0 : 1.0, {},
               false);
  o.report.add("agreement with A_X density", linking == s.nondegenerate,
               linking == s.nondegenerate ? 0.0 : 1.0);
  o.result["nondegenerate"] = s.nondegenerate;
  return o;
}

Outcome cmd_check_projection(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  const TroMap& p = require_p(l);
  PipelineOptions opts = pipeline_options(ctx);
  opts.last_gate = "tro_expectation";
  PipelineResult r = run_pipeline(l.t, l.x, p, opts);
  return {std::move(r.report), Json::object(), r.failed_gate};
}

Outcome cmd_extend(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  const TroMap& p = require_p(l);
  PipelineResult r = run_pipeline(l.t, l.x, p, pipeline_options(ctx));
  Outcome o{std::move(r.report), Json::object(), r.failed_gate};
  if (r.expectation) {
    describe_mask(*r.expectation, o);
    o.result["E_blocks"] = expectation_json(*r.expectation, ctx.file);
  }
  return o;
}

Outcome cmd_verify(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  if (!l.e) return cmd_extend(ctx);
  Outcome o;
  if (!structure_gates(l, l.p ? &*l.p : nullptr, ctx, o)) return o;
  const Report r = expectation::verify_expectation(
      *l.e, l.x, l.t, 8, ctx.flags.amp_level, ctx.seed,
      {ctx.flags.restarts, 100});
  o.report.append(r, "expectation: ");
  if (!r.passed()) o.failed_gate = "expectation";
  return o;
}

Outcome cmd_uniqueness(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  const TroMap& p = require_p(l);
  if (!l.e) throw InvalidInput("E_blocks: missing (required by uniqueness)");
  Outcome o;
  if (!structure_gates(l, &p, ctx, o)) return o;
  try {
    const auto u = expectation::uniqueness_check(*l.e, p, l.x, l.t, ctx.seed);
    o.report.add("precondition: E' is a conditional expectation with E'12 = P",
                 true, 0.0);
    o.report.add("forcing: E'11(t x*) = P(t) x*",
                 u.forcing_residual <= ctx.tol.residual, u.forcing_residual);
    o.report.add("E' = E blockwise", u.block_deviation <= ctx.tol.residual,
                 u.block_deviation);
    o.result["equal"] = u.equal;
  } catch (const PreconditionViolation& e) {
    o.report.add("precondition: E' is a conditional expectation with E'12 = P",
                 false, 1.0, e.what());
    o.failed_gate = "precondition";
  } catch (const Degeneracy& e) {
    o.report.add("precondition: X nondegenerate", false, 1.0, e.what());
    o.failed_gate = "precondition";
  }
  return o;
}

Outcome cmd_wstar(const Context& ctx) {
  const io::Loaded l = io::load(ctx.file, ctx.tol);
  Outcome o;
  if (!structure_gates(l, l.p ? &*l.p : nullptr, ctx, o)) return o;
  const Report r =
      wstar::finite_dim_wstar_check(l.x, l.t, l.p ? &*l.p : nullptr);
  o.report.append(r);
  return o;
}

int cmd_gen(const Flags& f, std::ostream& out) {
  const std::uint64_t seed = f.seed.value_or(0);
  auto inst = [&]() -> gen::Instance {
    if (f.family == "corner") {
      return gen::corner_instance(f.m, f.n, f.rank_e.value_or(f.m),
                                  f.rank_f.value_or(f.n), seed);
    }
    if (f.family == "group_average") {
      return gen::group_average_instance(f.m, f.n, f.order, seed);
    }
    if (f.family == "random") return gen::random_instance(f.max_dim, seed);
    if (f.family == "degenerate") {
      return gen::degenerate_instance(gen::parse_degenerate_kind(f.kind), seed);
    }
    throw InvalidInput("--family: expected corner, group_average, random or "
                       "degenerate");
  }();
  io::InstanceFile file = io::from_instance(inst);
  file.seed = seed;
  const std::string text = io::write_instance(file);
  if (f.out.empty()) {
    out << text;
  } else {
    std::ofstream o(f.out, std::ios::binary);
    if (!o) throw InvalidInput("--out: cannot write " + f.out);
    o << text;
    out << "wrote " << f.out << ": family=" << f.family
        << " provenance=" << gen::to_string(inst.provenance)
        << " nondegenerate=" << (inst.nondegenerate ? "yes" : "no")
        << " dim T=" << inst.t.dim() << " dim X=" << inst.x.dim() << '\n';
  }
  return 0;
}

void add_common(CLI::App* sub, Flags& f, bool input) {
  if (input) {
    sub->add_option("input", f.input, "Instance file (JSON)")->required();
  }
  sub->add_option("--out", f.out, "Write the structured report to this file");
  sub->add_option("--tol-residual", f.tol_residual, "Residual tolerance");
  sub->add_option("--tol-rank", f.tol_rank, "Relative rank cutoff");
  sub->add_option("--amp-level", f.amp_level, "Amplification level")
      ->check(CLI::Range(1, 16));
  sub->add_option("--restarts", f.restarts, "Random restarts per norm probe")
      ->check(CLI::Range(0, 100000));
  sub->add_option("--seed", f.seed, "Random seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Construct and verify conditional expectations between "
               "linking algebras of finite-dimensional TROs",
               "trolink"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"check-tro", "Check that span(T_basis) is a TRO"},
      {"closure", "Ternary closure of span(T_basis)"},
      {"linking", "Linking blocks and linking algebra of T"},
      {"check-subtro", "Nondegeneracy of X in T"},
      {"check-projection", "Check that P is a TRO conditional expectation"},
      {"extend", "Build the expectation E between linking algebras"},
      {"verify", "Verify E_blocks, or build and verify E from P"},
      {"uniqueness", "Compare E_blocks with the expectation built from P"},
      {"wstar", "Double-commutant checks"},
      {"gen", "Generate an instance file"}};
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, flags, name != "gen");
    subs[name] = sub;
  }
  CLI::App* g = subs["gen"];
  g->add_option("--family", flags.family,
                "corner, group_average, random or degenerate");
  g->add_option("--m", flags.m, "dim K")->check(CLI::Range(1, 64));
  g->add_option("--n", flags.n, "dim H")->check(CLI::Range(1, 64));
  g->add_option("--rank-e", flags.rank_e, "rank of e (corner)");
  g->add_option("--rank-f", flags.rank_f, "rank of f (corner)");
  g->add_option("--order", flags.order, "group order (group_average)");
  g->add_option("--kind", flags.kind,
                "missing_nondegeneracy, noncontractive_P or non_tro_X");
  g->add_option("--max-dim", flags.max_dim, "largest ambient size (random)")
      ->check(CLI::Range(1, 16));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  try {
    if (command == "gen") return cmd_gen(flags, out);

    Context ctx;
    ctx.flags = flags;
    {
      std::ifstream in(flags.input, std::ios::binary);
      if (!in) throw InvalidInput(flags.input + ": cannot open file");
      std::ostringstream buf;
      buf << in.rdbuf();
      ctx.digest = io::fnv1a_hex(buf.str());
      ctx.file = io::parse_instance(buf.str());
    }
    ctx.tol = ctx.file.tolerances.value_or(ToleranceProfile{});
    if (flags.tol_residual) ctx.tol.residual = *flags.tol_residual;
    if (flags.tol_rank) ctx.tol.rank_cut = *flags.tol_rank;
    ctx.tol.validate();
    ctx.seed = flags.seed.value_or(ctx.file.seed.value_or(0));

    const std::map<std::string, std::function<Outcome(const Context&)>> table = {
        {"check-tro", cmd_check_tro},
        {"closure", cmd_closure},
        {"linking", cmd_linking},
        {"check-subtro", cmd_check_subtro},
        {"check-projection", cmd_check_projection},
        {"extend", cmd_extend},
        {"verify", cmd_verify},
        {"uniqueness", cmd_uniqueness},
        {"wstar", cmd_wstar}};
    Outcome o = table.at(command)(ctx);
    const bool pass = o.report.passed();

    out << "trolink " << command << " " << flags.input << '\n';
    out << o.report.text();
    if (!o.failed_gate.empty()) out << "rejected at gate: " << o.failed_gate << '\n';

    if (!flags.out.empty()) {
      Json doc{{"tool", "trolink"},
               {"version", kVersion},
               {"command", command},
               {"input", flags.input},
               {"input_digest", "fnv1a64:" + ctx.digest},
               {"seed", ctx.seed},
               {"tolerances",
                Json{{"rank_cut", ctx.tol.rank_cut},
                     {"residual", ctx.tol.residual},
                     {"ortho", ctx.tol.ortho}}},
               {"checks", report_json(o.report)},
               {"failed_gate", o.failed_gate},
               {"result", o.result},
               {"verdict", pass ? "PASS" : "FAIL"}};
      std::ofstream f(flags.out, std::ios::binary);
      if (!f) throw InvalidInput("--out: cannot write " + flags.out);
      f << doc.dump(2) << '\n';
    }
    return pass ? 0 : 1;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotInSpan& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "check failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trolink::cli
