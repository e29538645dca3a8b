// apd: command-line front end for the 3-AP toolkit.

#include <apd/apstats.hpp>
#include <apd/construction.hpp>
#include <apd/fourier.hpp>
#include <apd/increment.hpp>
#include <apd/io.hpp>
#include <apd/parallel.hpp>
#include <apd/regularity.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

class ReportStream {
 public:
  explicit ReportStream(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      apd::require(static_cast<bool>(*file_), apd::ErrorKind::Format, "cannot open report '" + path + "'");
    }
  }

  void emit(const json& record) {
    std::ostream& os = file_ ? *file_ : std::cout;
    os << record.dump() << '\n';
  }

  void summary(json record) {
    apd::require(!summarized_, apd::ErrorKind::InvalidArgument, "summary already emitted");
    summarized_ = true;
    record["type"] = "summary";
    emit(record);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  bool summarized_ = false;
};

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check_json(const apd::PlanCheck& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"skipped", c.skipped}, {"lhs", nullable(c.lhs)},
          {"rhs", nullable(c.rhs)}, {"note", c.note}};
}

json subspace_json(const apd::Subspace& h) {
  json rows = json::array();
  for (const auto& r : h.rows()) rows.push_back(r);
  return {{"codim", h.codim()}, {"dim", h.dim()}, {"constraints", rows}};
}

apd::io::Encoding encoding_of(bool binary) { return binary ? apd::io::Encoding::Binary : apd::io::Encoding::Text; }

// ---------------------------------------------------------------------------
// Metadata written next to constructed functions so verify can recover the
// level profile.

std::string meta_path(const std::string& function_path) { return function_path + ".meta.json"; }

void write_meta(const std::string& function_path, const apd::ConstructionParams& params) {
  const json meta = {{"p", params.p},       {"alpha", params.alpha}, {"eta", params.eta},
                     {"dims", params.dims}, {"mus", params.mus},     {"seed", params.seed}};
  std::ofstream os(meta_path(function_path));
  apd::require(static_cast<bool>(os), apd::ErrorKind::Format, "cannot write " + meta_path(function_path));
  os << meta.dump(2) << '\n';
}

std::optional<apd::LevelProfile> read_meta(const std::string& function_path) {
  std::ifstream is(meta_path(function_path));
  if (!is) return std::nullopt;
  json meta;
  try {
    is >> meta;
    apd::LevelProfile prof;
    prof.p = meta.at("p").get<unsigned>();
    prof.alpha = meta.at("alpha").get<double>();
    prof.eta = meta.at("eta").get<double>();
    prof.n1 = meta.at("dims").at(0).get<unsigned>();
    prof.mus = meta.at("mus").get<std::vector<double>>();
    return prof;
  } catch (const json::exception& e) {
    apd::fail(apd::ErrorKind::Format, "bad metadata " + meta_path(function_path) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Subcommands

struct TransformArgs {
  std::string in, out, report;
  bool inverse = false, binary = false;
};

void run_transform(const TransformArgs& a) {
  ReportStream rs(a.report);
  if (!a.inverse) {
    const apd::GFunction f = apd::io::read_function_file(a.in);
    const apd::Spectrum s = apd::dft(f);
    std::ofstream os(a.out);
    apd::require(static_cast<bool>(os), apd::ErrorKind::Format, "cannot open '" + a.out + "'");
    apd::io::write_spectrum(os, s);
    double energy = 0.0, mean_square = 0.0;
    for (const auto& c : s.coeffs()) energy += std::norm(c);
    for (double v : f.values()) mean_square += v * v;
    mean_square /= static_cast<double>(f.size());
    rs.summary({{"command", "transform"}, {"p", f.space().p()}, {"n", f.space().n()},
                {"alpha", f.density()}, {"spectral_energy", energy}, {"mean_square", mean_square}});
  } else {
    std::ifstream is(a.in);
    apd::require(static_cast<bool>(is), apd::ErrorKind::Format, "cannot open '" + a.in + "'");
    const apd::Spectrum s = apd::io::read_spectrum(is);
    const apd::GFunction f = apd::idft(s);
    apd::io::write_function_file(a.out, f, encoding_of(a.binary));
    rs.summary({{"command", "transform"}, {"inverse", true}, {"p", f.space().p()}, {"n", f.space().n()},
                {"alpha", f.density()}, {"signed", f.is_signed()}});
  }
}

json ap_summary(const apd::APReport& r, double eps) {
  json s = {{"alpha", r.alpha}, {"lambda", r.lambda}, {"z", r.z}, {"margin", r.margin(eps)}};
  if (r.max_nonzero) {
    s["max_nonzero_rho"] = r.max_nonzero->value;
    s["argmax_d"] = r.max_nonzero->d.index;
    s["min_nonzero_rho"] = r.min_nonzero->value;
    s["argmin_d"] = r.min_nonzero->d.index;
  } else {
    s["max_nonzero_rho"] = nullptr;
    s["argmax_d"] = nullptr;
  }
  return s;
}

struct ScanArgs {
  std::string in, report;
  bool summary_only = false;
};

void run_scan(const ScanArgs& a) {
  const apd::GFunction f = apd::io::read_function_file(a.in);
  ReportStream rs(a.report);
  const apd::APReport r = apd::rho_scan(f);
  if (!a.summary_only)
    for (apd::Index d = 0; d < r.rho.size(); ++d) rs.emit({{"type", "rho"}, {"d", d}, {"value", r.rho[d]}});
  json s = ap_summary(r, 0.0);
  s["command"] = "scan";
  rs.summary(s);
}

struct RegularizeArgs {
  std::string in, report, delta;
  bool pad = false;
};

void run_regularize(const RegularizeArgs& a) {
  const apd::GFunction f = apd::io::read_function_file(a.in);
  ReportStream rs(a.report);
  const apd::RegularityCertificate cert = apd::weak_regular_subspace(f, apd::io::parse_real(a.delta), a.pad);
  json spectrum = json::array();
  for (apd::Point t : cert.large_spectrum) spectrum.push_back(t.index);
  rs.summary({{"command", "regularize"},
              {"delta", cert.delta},
              {"large_spectrum", spectrum},
              {"large_spectrum_size", cert.large_spectrum.size()},
              {"subspace", subspace_json(cert.subspace)},
              {"achieved_gap", cert.achieved_gap},
              {"gap_argmax", cert.gap_argmax.index},
              {"codim_requested", cert.codim_requested},
              {"codim_actual", cert.codim_actual}});
}

struct IncrementArgs {
  std::string in, report, epsilon, eta;
  unsigned max_steps = 16;
  apd::Index max_cosets = apd::Index{1} << 16;
};

void run_increment_cmd(const IncrementArgs& a) {
  const apd::GFunction f = apd::io::read_function_file(a.in);
  ReportStream rs(a.report);
  const std::vector<double> etas = apd::io::parse_real_list(a.eta);
  const apd::IncrementTrace trace =
      apd::run_increment(f, apd::io::parse_real(a.epsilon), etas, {a.max_steps, a.max_cosets});
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const apd::StepRecord& s = trace.steps[i];
    rs.emit({{"type", "trace_step"}, {"step", i}, {"codim", s.codim}, {"b", s.b},
             {"mean_lambda", nullable(s.mean_lambda)}, {"eta", s.eta}});
  }
  rs.summary({{"command", "increment"}, {"alpha", f.density()}, {"steps", trace.steps.size()},
              {"termination", apd::to_string(trace.termination)},
              {"final_subspace", subspace_json(trace.final_subspace)}});
}

json property_json(const apd::PropertyResult& p, std::optional<unsigned> level) {
  json j = {{"type", "property"}, {"id", p.id},        {"pass", p.pass},
            {"measured", p.measured}, {"bound", p.bound}, {"detail", p.detail}};
  if (level) j["level"] = *level;
  return j;
}

void emit_verification(ReportStream& rs, const apd::FivePropertyReport& rep, std::optional<unsigned> level) {
  for (const auto& p : rep.properties) rs.emit(property_json(p, level));
}

struct ConstructArgs {
  unsigned p = 3;
  std::string alpha, eta, dims, mus, epsilon = "0", out, report;
  std::uint64_t seed = 0;
  double slack = 0.0;
  unsigned attempts = 20000, draws = 256;
  bool strict = false, random_selection = false, binary = false;
};

void run_construct(const ConstructArgs& a) {
  apd::ConstructionParams params;
  params.p = a.p;
  params.alpha = apd::io::parse_real(a.alpha);
  params.eta = apd::io::parse_real(a.eta);
  for (double m : apd::io::parse_real_list(a.dims)) {
    apd::require(m >= 1 && m == std::floor(m), apd::ErrorKind::InvalidArgument, "--dims needs positive integers");
    params.dims.push_back(static_cast<unsigned>(m));
  }
  params.mus = apd::io::parse_real_list(a.mus);
  params.seed = a.seed;
  params.directions = {a.slack, a.attempts, a.draws, a.strict};
  params.random_selection = a.random_selection;
  const double eps = apd::io::parse_real(a.epsilon);

  ReportStream rs(a.report);
  const std::vector<apd::LevelState> levels = apd::build_construction(params);
  apd::APReport last;
  for (const apd::LevelState& s : levels) {
    last = apd::rho_scan(s.f);
    emit_verification(rs, apd::verify_five_properties(s.f, s.profile, eps, last), s.level);
  }
  apd::io::write_function_file(a.out, levels.back().f, encoding_of(a.binary));
  write_meta(a.out, params);

  json s = ap_summary(last, 0.0);
  const apd::FivePropertyReport final_rep = apd::verify_five_properties(levels.back().f, levels.back().profile, eps, last);
  s["command"] = "construct";
  s["levels"] = levels.size();
  s["p"] = params.p;
  s["n"] = levels.back().space.n();
  s["eps_effective"] = final_rep.eps_effective;
  s["all_pass"] = final_rep.all_pass();
  json dirs = json::array();
  for (std::size_t i = 1; i < levels.size(); ++i)
    dirs.push_back({{"level", levels[i].level},
                    {"h_points", levels[i].h_points},
                    {"directions", levels[i].directions.directions},
                    {"worst_h_mean", levels[i].directions.worst_h_mean},
                    {"threshold", levels[i].directions.threshold},
                    {"attempts", levels[i].directions.diagnostics.attempts}});
  s["direction_maps"] = dirs;
  rs.summary(s);
}

struct RoundArgs {
  std::string in, eps_star, out, report;
  std::uint64_t seed = 0;
  unsigned retries = 3;
};

void run_round(const RoundArgs& a) {
  const apd::GFunction f = apd::io::read_function_file(a.in);
  const double eps_star = apd::io::parse_real(a.eps_star);
  ReportStream rs(a.report);
  const double bound = apd::rounding_hypothesis_bound(f.size());
  if (eps_star < bound)
    std::cerr << "apd: warning: eps-star " << eps_star << " is below 2 sqrt(ln(12N)/N) = " << bound
              << "; proceeding best-effort\n";
  const apd::RoundResult r = apd::round_to_set(f, eps_star, a.seed, a.retries);
  apd::io::write_set_file(a.out, f.space(), r.set);
  rs.summary({{"command", "round"},
              {"alpha", f.density()},
              {"set_size", r.set.size()},
              {"density_deviation", r.density_deviation},
              {"max_rho_deviation", r.max_rho_deviation},
              {"worst_d", r.worst_d},
              {"attempts", r.attempts},
              {"eps_star", eps_star},
              {"hypothesis_bound", bound},
              {"hypothesis_holds", r.hypothesis_holds}});
}

struct PlanArgs {
  std::string mode, epsilon, alpha = "0.5", report;
  unsigned p = 3;
};

void run_plan(const PlanArgs& a) {
  ReportStream rs(a.report);
  const double eps = apd::io::parse_real(a.epsilon);
  json checks = json::array();
  if (a.mode == "upper") {
    const apd::UpperBoundPlan plan = apd::plan_upper_bound(a.p, eps, apd::io::parse_real(a.alpha));
    for (const auto& c : plan.checks) checks.push_back(check_json(c));
    rs.summary({{"command", "plan"},
                {"mode", "upper"},
                {"p", plan.p},
                {"epsilon", plan.epsilon},
                {"alpha", plan.alpha},
                {"height", plan.height},
                {"top", 1.0 / plan.epsilon},
                {"bound", plan.bound.str()},
                {"max_increments", plan.max_increments},
                {"checks", checks}});
  } else {
    const apd::TowerPlan plan = apd::plan_lower_schedule(a.p, eps);
    for (const auto& c : plan.checks) checks.push_back(check_json(c));
    json m = json::array(), n = json::array();
    for (const auto& t : plan.m) m.push_back(t.str());
    for (const auto& t : plan.n) n.push_back(t.str());
    rs.summary({{"command", "plan"},
                {"mode", "lower"},
                {"p", plan.p},
                {"epsilon", plan.epsilon},
                {"in_regime", plan.in_regime},
                {"s", plan.s},
                {"m1", plan.m1},
                {"sigma", plan.sigma},
                {"mu", plan.mu},
                {"m", m},
                {"n", n},
                {"height_real", plan.height_real},
                {"height_claim", plan.height_claim},
                {"all_pass", plan.all_pass()},
                {"checks", checks}});
  }
}

struct VerifyArgs {
  std::string in, epsilon = "0", report, alpha, eta, mus;
  unsigned m1 = 0;
};

void run_verify(const VerifyArgs& a) {
  const apd::GFunction f = apd::io::read_function_file(a.in);
  ReportStream rs(a.report);
  std::optional<apd::LevelProfile> prof = read_meta(a.in);
  const bool explicit_profile = !a.eta.empty() || a.m1 != 0;
  if (explicit_profile) {
    apd::require(!a.eta.empty() && a.m1 != 0, apd::ErrorKind::InvalidArgument, "--eta and --m1 go together");
    apd::LevelProfile p;
    p.p = f.space().p();
    p.alpha = a.alpha.empty() ? f.density() : apd::io::parse_real(a.alpha);
    p.eta = apd::io::parse_real(a.eta);
    p.n1 = a.m1;
    p.mus = apd::io::parse_real_list(a.mus);
    prof = p;
  }
  const double eps = apd::io::parse_real(a.epsilon);
  const apd::APReport r = apd::rho_scan(f);
  json s = ap_summary(r, 0.0);
  s["command"] = "verify";
  if (prof) {
    apd::require(prof->p == f.space().p(), apd::ErrorKind::InvalidArgument, "metadata p does not match the file");
    const apd::FivePropertyReport rep = apd::verify_five_properties(f, *prof, eps, r);
    emit_verification(rs, rep, std::nullopt);
    s["profile"] = "full";
    s["eps_effective"] = rep.eps_effective;
    s["all_pass"] = rep.all_pass();
  } else {
    // Without a level profile only the profile-free properties apply.
    const double alpha = a.alpha.empty() ? f.density() : apd::io::parse_real(a.alpha);
    const double a3 = alpha * alpha * alpha;
    const double top = r.max_nonzero ? r.max_nonzero->value : 0.0;
    const bool p1 = std::abs(r.alpha - alpha) <= 1e-9;
    const bool p4 = !r.max_nonzero || (1.0 - eps) * a3 - top > 1e-12;
    rs.emit({{"type", "property"}, {"id", 1}, {"pass", p1}, {"measured", r.alpha}, {"bound", alpha}});
    for (int id : {2, 3, 5})
      rs.emit({{"type", "property"}, {"id", id}, {"pass", nullptr}, {"measured", nullptr}, {"skipped", true}});
    rs.emit({{"type", "property"}, {"id", 4}, {"pass", p4}, {"measured", top}, {"bound", (1.0 - eps) * a3}});
    s["profile"] = "none";
    s["eps_effective"] = 1.0 - top / a3;
    s["all_pass"] = p1 && p4;
  }
  rs.summary(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Popular 3-AP differences in F_p^n: transforms, scans, regularity, increments and constructions"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: APD_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "Fourier transform of a function file, or its inverse");
  transform->add_option("--in", ta.in, "Input function (or spectrum with --inverse)")->required();
  transform->add_option("--out", ta.out, "Output spectrum (or function with --inverse)")->required();
  transform->add_flag("--inverse", ta.inverse, "Invert a spectrum file");
  transform->add_flag("--binary", ta.binary, "Write the inverse result in binary");
  transform->add_option("--report", ta.report, "Report path (default stdout)");

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan", "rho(d) for every difference d");
  scan->add_option("--in", sa.in, "Function file")->required();
  scan->add_option("--report", sa.report, "Report path (default stdout)");
  scan->add_flag("--summary-only", sa.summary_only, "Omit per-difference records");

  RegularizeArgs ra;
  auto* regularize = app.add_subcommand("regularize", "delta-weakly-regular subspace with certificate");
  regularize->add_option("--in", ra.in, "Function file")->required();
  regularize->add_option("--delta", ra.delta, "delta in (0, 1]")->required();
  regularize->add_flag("--pad", ra.pad, "Pad to codimension min(floor(delta^-2), n)");
  regularize->add_option("--report", ra.report, "Report path (default stdout)");

  IncrementArgs ia;
  auto* increment = app.add_subcommand("increment", "Mean-cube-density increment iteration");
  increment->add_option("--in", ia.in, "Function file")->required();
  increment->add_option("--epsilon", ia.epsilon, "epsilon")->required();
  increment->add_option("--eta", ia.eta, "eta, or a comma-separated schedule")->required();
  increment->add_option("--max-steps", ia.max_steps, "Step budget");
  increment->add_option("--max-cosets", ia.max_cosets, "Coset budget per step");
  increment->add_option("--report", ia.report, "Report path (default stdout)");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Multi-level lower-bound construction");
  construct->add_option("--p", ca.p, "Odd prime")->required();
  construct->add_option("--alpha", ca.alpha, "Density in (0, 1/2]")->required();
  construct->add_option("--eta", ca.eta, "Level-1 perturbation")->required();
  construct->add_option("--dims", ca.dims, "m_1,m_2,...")->required();
  construct->add_option("--mus", ca.mus, "mu_2,... (one per level after the first)");
  construct->add_option("--seed", ca.seed, "Seed")->required();
  construct->add_option("--out", ca.out, "Output function file")->required();
  construct->add_option("--epsilon", ca.epsilon, "epsilon for property 4");
  construct->add_option("--slack", ca.slack, "Slack on zeta^3 - 1/125");
  construct->add_option("--attempts", ca.attempts, "Direction-map attempts per level");
  construct->add_option("--draws", ca.draws, "Draws per point within an attempt");
  construct->add_flag("--strict", ca.strict, "Independence for all triples in H_i");
  construct->add_flag("--random-selection", ca.random_selection, "Seeded random H_i instead of lowest indices");
  construct->add_flag("--binary", ca.binary, "Binary function output");
  construct->add_option("--report", ca.report, "Report path (default stdout)");

  RoundArgs roa;
  auto* round = app.add_subcommand("round", "Random rounding of a weighted set to a set");
  round->add_option("--in", roa.in, "Function file")->required();
  round->add_option("--eps-star", roa.eps_star, "Deviation tolerance")->required();
  round->add_option("--seed", roa.seed, "Seed")->required();
  round->add_option("--retries", roa.retries, "Attempts")->check(CLI::PositiveNumber);
  round->add_option("--out", roa.out, "Output set file")->required();
  round->add_option("--report", roa.report, "Report path (default stdout)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Tower-bound parameter planners");
  plan->add_option("--mode", pa.mode, "upper or lower")->required()->check(CLI::IsMember({"upper", "lower"}));
  plan->add_option("--p", pa.p, "Odd prime")->required();
  plan->add_option("--epsilon", pa.epsilon, "epsilon, e.g. 2^-160*3^-8")->required();
  plan->add_option("--alpha", pa.alpha, "Density (upper mode)");
  plan->add_option("--report", pa.report, "Report path (default stdout)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Five-property check of a function file");
  verify->add_option("--in", va.in, "Function file")->required();
  verify->add_option("--epsilon", va.epsilon, "epsilon for property 4");
  verify->add_option("--alpha", va.alpha, "Expected density (default: measured)");
  verify->add_option("--eta", va.eta, "Level-1 perturbation (overrides metadata)");
  verify->add_option("--m1", va.m1, "Level-1 dimension (with --eta)");
  verify->add_option("--mus", va.mus, "mu_2,... (with --eta)");
  verify->add_option("--report", va.report, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), '\n', ' ');
    std::cerr << "apd: error: " << what << '\n';
    return 2;
  }

  try {
    if (threads > 0) apd::set_worker_count(threads);
    if (*transform) run_transform(ta);
    else if (*scan) run_scan(sa);
    else if (*regularize) run_regularize(ra);
    else if (*increment) run_increment_cmd(ia);
    else if (*construct) run_construct(ca);
    else if (*round) run_round(roa);
    else if (*plan) run_plan(pa);
    else if (*verify) run_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "apd: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
