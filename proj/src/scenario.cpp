#include "lrsim/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lrsim {

namespace {

double to_double(const std::string& section, const std::string& key, const std::string& value) {
  std::size_t consumed = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != value.size())
    throw config_error("[" + section + "] " + key + ": '" + value + "' is not a number");
  return parsed;
}

long to_long(const std::string& section, const std::string& key, const std::string& value) {
  const double v = to_double(section, key, value);
  const long n = std::lround(v);
  if (std::abs(v - static_cast<double>(n)) > 1e-9)
    throw config_error("[" + section + "] " + key + ": '" + value + "' is not an integer");
  return n;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw config_error("[" + section + "] " + key + ": expected true/false");
}

std::vector<std::string> split_tokens(const std::string& value) {
  std::vector<std::string> tokens;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

ScalarFunction parse_function(const std::string& section, const std::string& key,
                              const std::string& value) {
  const std::vector<std::string> tokens = split_tokens(value);
  if (tokens.empty())
    throw config_error("[" + section + "] " + key + ": empty value");

  const auto numbers = [&](std::size_t expect) {
    if (tokens.size() != expect + 1)
      throw config_error("[" + section + "] " + key + ": '" + tokens[0] + "' takes " +
                         std::to_string(expect) + " parameter(s)");
    std::vector<double> out;
    for (std::size_t i = 1; i < tokens.size(); ++i)
      out.push_back(to_double(section, key, tokens[i]));
    return out;
  };

  const std::string& kind = tokens[0];
  if (kind == "constant") {
    const auto c = numbers(1);
    return ScalarFunction::constant(c[0]);
  }
  if (kind == "linear") {
    const auto c = numbers(2);
    return ScalarFunction::linear(c[0], c[1]);
  }
  if (kind == "sinusoid") {
    const auto c = numbers(4);
    return ScalarFunction::sinusoid(c[0], c[1], c[2], c[3]);
  }
  if (kind == "winding") {
    const auto c = numbers(1);
    return ScalarFunction::winding(c[0]);
  }
  if (tokens.size() == 1)  // bare number means constant
    return ScalarFunction::constant(to_double(section, key, tokens[0]));
  throw config_error("[" + section + "] " + key + ": unknown function kind '" + kind + "'");
}

AuxMode parse_mode(const std::string& section, const std::string& value) {
  if (value == "integrated") return AuxMode::integrated;
  if (value == "stationary") return AuxMode::stationary;
  if (value == "adiabatic") return AuxMode::adiabatic;
  throw config_error("[" + section + "] mode: expected integrated, stationary or adiabatic");
}

Route parse_route(const std::string& section, const std::string& name) {
  if (name == "matrix-element") return Route::matrix_element;
  if (name == "closed-form") return Route::closed_form;
  if (name == "adiabatic-formula") return Route::adiabatic_formula;
  if (name == "oracle-overlap") return Route::oracle_overlap;
  throw config_error("[" + section + "] routes: unknown route '" + name + "'");
}

// Rejects keys outside the allowed set so typos fail loudly.
void check_keys(const Config::Section& section, const std::set<std::string>& allowed) {
  for (const auto& e : section.entries)
    if (!allowed.count(e.key))
      throw config_error("[" + section.name + "]: unknown key '" + e.key + "'");
}

const std::string* find_value(const Config::Section& section, const std::string& key) {
  const Config::Entry* e = section.find(key);
  return e ? &e->value : nullptr;
}

const std::string& require_value(const Config::Section& section, const std::string& key) {
  const Config::Entry* e = section.find(key);
  if (!e) throw config_error("[" + section.name + "]: missing key '" + key + "'");
  return e->value;
}

void validate_lambda(const AlgebraSpec& alg, double j, double lambda) {
  const double mu = lambda / alg.m;
  const double k = j - mu;
  if (std::abs(k - std::round(k)) > 1e-9 || std::round(k) < 0.0 ||
      std::round(k) > std::round(2.0 * j)) {
    std::ostringstream os;
    os << "[scenario] lambda: " << lambda << " is not an eigenvalue of A_z for j=" << j
       << ", m=" << alg.m;
    throw config_error(os.str());
  }
}

}  // namespace

bool VerificationReport::overall_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

Scenario load_scenario(const Config& cfg) {
  Scenario sc;

  for (const auto& section : cfg.sections) {
    const std::string& name = section.name;
    const bool known = name == "algebra" || name == "time" || name == "scenario" ||
                       name == "output" || name == "tolerances" || name == "scan" ||
                       name == "cini" || name.rfind("cini.level.", 0) == 0 ||
                       name.rfind("branch.", 0) == 0;
    if (!known) throw config_error("unknown section [" + name + "]");
  }

  const Config::Section* time = cfg.find("time");
  if (!time) throw config_error("missing section [time]");
  check_keys(*time, {"T", "step"});
  sc.T = to_double("time", "T", require_value(*time, "T"));
  if (!(sc.T > 0.0)) throw config_error("[time] T: must be positive");
  if (const auto* v = find_value(*time, "step")) {
    sc.step = to_double("time", "step", *v);
    if (!(sc.step > 0.0)) throw config_error("[time] step: must be positive");
  }

  if (const Config::Section* tol = cfg.find("tolerances")) {
    check_keys(*tol, {"commutator", "invariant_residual", "displacement_conjugation",
                      "hv_offdiagonal", "hv_coefficient", "lr_schrodinger",
                      "oracle_overlap", "overlap_vs_factor", "abs_f_excess", "f_symmetry",
                      "sin_floor"});
    const auto get = [&](const char* key, double& slot) {
      if (const auto* v = find_value(*tol, key)) {
        slot = to_double("tolerances", key, *v);
        if (!(slot > 0.0))
          throw config_error(std::string("[tolerances] ") + key + ": must be positive");
      }
    };
    get("commutator", sc.tol.commutator);
    get("invariant_residual", sc.tol.invariant_residual);
    get("displacement_conjugation", sc.tol.displacement_conjugation);
    get("hv_offdiagonal", sc.tol.hv_offdiagonal);
    get("hv_coefficient", sc.tol.hv_coefficient);
    get("lr_schrodinger", sc.tol.lr_schrodinger);
    get("oracle_overlap", sc.tol.oracle_overlap);
    get("overlap_vs_factor", sc.tol.overlap_vs_factor);
    get("abs_f_excess", sc.tol.abs_f_excess);
    get("f_symmetry", sc.tol.f_symmetry);
    get("sin_floor", sc.tol.sin_floor);
  }

  AuxMode scenario_mode = AuxMode::integrated;
  bool scenario_mode_given = false;
  if (const Config::Section* s = cfg.find("scenario")) {
    check_keys(*s, {"lambda", "routes", "mode", "richardson"});
    if (const auto* v = find_value(*s, "lambda"))
      sc.lambda = to_double("scenario", "lambda", *v);
    if (const auto* v = find_value(*s, "richardson"))
      sc.richardson = to_bool("scenario", "richardson", *v);
    if (const auto* v = find_value(*s, "mode")) {
      scenario_mode = parse_mode("scenario", *v);
      scenario_mode_given = true;
    }
    if (const auto* v = find_value(*s, "routes")) {
      std::stringstream in(*v);
      std::string item;
      while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos)
          throw config_error("[scenario] routes: empty route name");
        sc.routes.push_back(parse_route("scenario", item.substr(first, last - first + 1)));
      }
    }
  }
  if (sc.routes.empty()) sc.routes.push_back(Route::matrix_element);

  if (const Config::Section* out = cfg.find("output")) {
    check_keys(*out, {"dir"});
    if (const auto* v = find_value(*out, "dir")) sc.output_dir = *v;
  }

  if (const Config::Section* scan = cfg.find("scan")) {
    check_keys(*scan, {"jmax", "delta"});
    ScanSpec spec;
    spec.j_max = to_double("scan", "jmax", require_value(*scan, "jmax"));
    if (!is_half_integer(spec.j_max))
      throw config_error("[scan] jmax: must be a positive half-integer");
    if (const auto* v = find_value(*scan, "delta"))
      spec.delta = to_double("scan", "delta", *v);
    sc.scan = spec;
  }

  // Branch protocols.
  std::vector<const Config::Section*> branch_sections;
  for (const auto& section : cfg.sections)
    if (section.name.rfind("branch.", 0) == 0) branch_sections.push_back(&section);
  const Config::Section* cini = cfg.find("cini");

  if (cini && !branch_sections.empty())
    throw config_error("scenario cannot declare both [cini] and [branch.*] sections");
  if (!cini && branch_sections.empty())
    throw config_error("scenario needs [branch.<label>] sections or a [cini] section");

  if (!branch_sections.empty()) {
    const Config::Section* algebra = cfg.find("algebra");
    if (!algebra) throw config_error("missing section [algebra]");
    check_keys(*algebra, {"m", "n", "j"});
    sc.algebra.m = to_double("algebra", "m", require_value(*algebra, "m"));
    sc.algebra.n = to_double("algebra", "n", require_value(*algebra, "n"));
    sc.j = to_double("algebra", "j", require_value(*algebra, "j"));
    try {
      validate(sc.algebra);
    } catch (const std::exception& e) {
      throw config_error(std::string("[algebra]: ") + e.what());
    }
    if (!is_half_integer(sc.j))
      throw config_error("[algebra] j: must be a positive half-integer");

    for (const Config::Section* bs : branch_sections) {
      check_keys(*bs, {"omega", "theta", "phi", "a0", "b0", "mode"});
      BranchSpec spec;
      spec.label = bs->name.substr(std::string("branch.").size());
      if (spec.label.empty())
        throw config_error("[" + bs->name + "]: empty branch label");
      spec.protocol.omega = parse_function(bs->name, "omega", require_value(*bs, "omega"));
      spec.protocol.theta = parse_function(bs->name, "theta", require_value(*bs, "theta"));
      spec.protocol.phi = parse_function(bs->name, "phi", require_value(*bs, "phi"));
      spec.protocol.horizon = sc.T;
      spec.protocol.label = spec.label;
      spec.init = default_initial_state(spec.protocol);
      if (const auto* v = find_value(*bs, "a0")) {
        spec.init.a = to_double(bs->name, "a0", *v);
        spec.explicit_init = true;
      }
      if (const auto* v = find_value(*bs, "b0")) {
        spec.init.b = to_double(bs->name, "b0", *v);
        spec.explicit_init = true;
      }
      if (const auto* v = find_value(*bs, "mode")) spec.mode = parse_mode(bs->name, *v);
      sc.branches.push_back(std::move(spec));
    }
  }

  if (cini) {
    check_keys(*cini, {"omega1", "omega2", "n1", "n2", "levels", "pair"});
    if (cfg.find("algebra"))
      throw config_error("[algebra] conflicts with [cini]; the sector fixes m=1, n=2, j");
    CiniScenario cs;
    cs.mode = scenario_mode_given ? scenario_mode : AuxMode::integrated;
    cs.model.omega1 = parse_function("cini", "omega1", require_value(*cini, "omega1"));
    cs.model.omega2 = parse_function("cini", "omega2", require_value(*cini, "omega2"));
    cs.model.n1 = static_cast<int>(to_long("cini", "n1", require_value(*cini, "n1")));
    cs.model.n2 = static_cast<int>(to_long("cini", "n2", require_value(*cini, "n2")));
    const long levels = to_long("cini", "levels", require_value(*cini, "levels"));
    if (levels < 1) throw config_error("[cini] levels: must be at least 1");

    for (long k = 1; k <= levels; ++k) {
      const std::string section_name = "cini.level." + std::to_string(k);
      CiniLevel level;
      if (const Config::Section* ls = cfg.find(section_name)) {
        check_keys(*ls, {"energy", "g_re", "g_im"});
        if (const auto* v = find_value(*ls, "energy"))
          level.energy = parse_function(section_name, "energy", *v);
        if (const auto* v = find_value(*ls, "g_re"))
          level.g_re = parse_function(section_name, "g_re", *v);
        if (const auto* v = find_value(*ls, "g_im"))
          level.g_im = parse_function(section_name, "g_im", *v);
      } else {
        throw config_error("missing section [" + section_name + "]");
      }
      cs.model.levels.push_back(std::move(level));
    }
    for (const auto& section : cfg.sections) {
      if (section.name.rfind("cini.level.", 0) != 0) continue;
      const long k = to_long(section.name, "index",
                             section.name.substr(std::string("cini.level.").size()));
      if (k < 1 || k > levels)
        throw config_error("[" + section.name + "]: level outside 1.." +
                           std::to_string(levels));
    }
    try {
      validate(cs.model);
    } catch (const std::exception& e) {
      throw config_error(std::string("[cini]: ") + e.what());
    }

    cs.level_i = 0;
    cs.level_j = levels > 1 ? 1 : 0;
    if (const auto* v = find_value(*cini, "pair")) {
      const auto tokens = split_tokens(*v);
      if (tokens.size() != 2)
        throw config_error("[cini] pair: expected two level numbers");
      cs.level_i = static_cast<int>(to_long("cini", "pair", tokens[0])) - 1;
      cs.level_j = static_cast<int>(to_long("cini", "pair", tokens[1])) - 1;
    }
    if (cs.level_i < 0 || cs.level_j < 0 || cs.level_i >= levels || cs.level_j >= levels)
      throw config_error("[cini] pair: level numbers outside 1.." + std::to_string(levels));
    if (cs.level_i == cs.level_j)
      throw config_error("[cini] pair: levels must differ");

    sc.algebra = {1.0, 2.0};
    sc.j = cs.model.j_spin();
    sc.cini = std::move(cs);
  } else if (scenario_mode_given) {
    throw config_error("[scenario] mode: only valid for [cini] scenarios; protocol "
                       "branches take a per-branch mode");
  }

  if (sc.lambda) validate_lambda(sc.algebra, sc.j, *sc.lambda);
  return sc;
}

PreparedScenario prepare_scenario(const Scenario& sc, const RunOptions& opts) {
  PreparedScenario prep;
  const double step_cfg = opts.step.value_or(sc.step);

  std::vector<BranchSpec> branches;
  std::vector<BranchHamiltonian> cini_branches;

  if (sc.cini) {
    const double sample0 = step_cfg > 0.0 ? step_cfg : sc.T / 2048.0;
    const std::array<int, 2> pair = {sc.cini->level_i, sc.cini->level_j};
    for (int lvl : pair) {
      BranchHamiltonian bh = reduce_to_sector(sc.cini->model, lvl);
      BranchProtocol bp = branch_protocol(bh, sc.T, sample0);
      if (bp.degenerate)
        throw degenerate_branch_error("level " + std::to_string(lvl + 1) +
                                      " has omega = 0; theta is undefined");
      BranchSpec spec;
      spec.label = "level" + std::to_string(lvl + 1);
      spec.protocol = std::move(bp.protocol);
      spec.protocol.label = spec.label;
      spec.init = default_initial_state(spec.protocol);
      spec.mode = sc.cini->mode;
      branches.push_back(std::move(spec));
      cini_branches.push_back(std::move(bh));
    }
  } else {
    branches = sc.branches;
  }

  prep.rep = build_representation(sc.algebra, sc.j);
  prep.lambda = sc.lambda.value_or(sc.algebra.m * sc.j);

  double step = step_cfg;
  if (step <= 0.0) {
    step = 1e-2;
    for (const BranchSpec& b : branches) step = std::min(step, default_step(b.protocol));
  }
  prep.step = step;

  // Resample cini branch protocols when the integration grid is finer than
  // the provisional sampling.
  if (sc.cini && step_cfg <= 0.0 && step < sc.T / 2048.0) {
    for (std::size_t k = 0; k < branches.size(); ++k) {
      BranchProtocol bp = branch_protocol(cini_branches[k], sc.T, step);
      bp.protocol.label = branches[k].label;
      branches[k].protocol = std::move(bp.protocol);
      branches[k].init = default_initial_state(branches[k].protocol);
    }
  }

  for (std::size_t k = 0; k < branches.size(); ++k) {
    PreparedBranch pb;
    pb.spec = branches[k];
    switch (pb.spec.mode) {
      case AuxMode::adiabatic:
        pb.sol = adiabatic_solution(pb.spec.protocol, sc.T, step);
        break;
      case AuxMode::stationary:
        pb.sol = stationary_solution(pb.spec.protocol, pb.spec.init, sc.T, step);
        break;
      case AuxMode::integrated:
      default: {
        SolveOptions so;
        so.step = step;
        so.richardson_check = sc.richardson;
        so.sin_floor = sc.tol.sin_floor;
        pb.sol = solve_auxiliary(pb.spec.protocol, sc.algebra, pb.spec.init, sc.T, so);
        break;
      }
    }
    pb.ph = phases(pb.sol, pb.spec.protocol, prep.rep, prep.lambda);
    if (sc.cini) {
      const BranchHamiltonian bh = cini_branches[k];
      const Representation rep = prep.rep;
      pb.oracle_h = [bh, rep](double t) { return branch_matrix(bh, rep, t, false); };
    } else {
      const Protocol p = pb.spec.protocol;
      const Representation rep = prep.rep;
      pb.oracle_h = [p, rep](double t) { return hamiltonian_matrix(p, rep, t); };
    }
    prep.branches.push_back(std::move(pb));
  }
  return prep;
}

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines on any platform
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

}  // namespace

void write_aux_csv(const std::filesystem::path& path, const AuxiliarySolution& sol) {
  std::ofstream out = open_out(path);
  out << "t,a,b\n";
  for (std::size_t k = 0; k < sol.size(); ++k)
    out << format_float(sol.times[k]) << ',' << format_float(sol.a[k]) << ','
        << format_float(sol.b[k]) << '\n';
}

void write_phases_csv(const std::filesystem::path& path, const PhaseDecomposition& ph) {
  std::ofstream out = open_out(path);
  out << "t,phi_d,phi_g,phi_total\n";
  for (std::size_t k = 0; k < ph.size(); ++k)
    out << format_float(ph.times[k]) << ',' << format_float(ph.phi_d[k]) << ','
        << format_float(ph.phi_g[k]) << ',' << format_float(ph.phi_total[k]) << '\n';
}

void write_decoherence_csv(const std::filesystem::path& path,
                           const std::vector<DecoherenceSeries>& series) {
  std::ofstream out = open_out(path);
  out << "t,re_F,im_F,abs_F,route\n";
  for (const DecoherenceSeries& s : series)
    for (std::size_t k = 0; k < s.size(); ++k)
      out << format_float(s.times[k]) << ',' << format_float(s.F[k].real()) << ','
          << format_float(s.F[k].imag()) << ',' << format_float(std::abs(s.F[k])) << ','
          << to_string(s.route) << '\n';
}

void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan) {
  std::ofstream out = open_out(path);
  out << "j,abs_F\n";
  for (const ScanPoint& p : scan.points)
    out << format_float(p.j) << ',' << format_float(p.abs_F) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  out << "t";
  const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
  for (Eigen::Index c = 0; c < dim; ++c) out << ",re_" << c << ",im_" << c;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_float(traj.times[k]);
    for (Eigen::Index c = 0; c < dim; ++c)
      out << ',' << format_float(traj.states[k](c).real()) << ','
          << format_float(traj.states[k](c).imag());
    out << '\n';
  }
}

void write_report_csv(const std::filesystem::path& path, const VerificationReport& report) {
  std::ofstream out = open_out(path);
  out << "check,measured,threshold,status\n";
  for (const CheckResult& c : report.checks)
    out << c.name << ',' << format_float(c.measured) << ',' << format_float(c.threshold)
        << ',' << (c.pass ? "pass" : "fail") << '\n';
  out << "overall,0,0," << (report.overall_pass() ? "pass" : "fail") << '\n';
}

namespace {

std::filesystem::path resolve_output_dir(const Scenario& sc, const RunOptions& opts) {
  return std::filesystem::path(opts.output_dir.value_or(sc.output_dir));
}

bool shared_init(const PreparedBranch& a, const PreparedBranch& b) {
  return std::abs(a.spec.init.a - b.spec.init.a) <= 1e-12 &&
         std::abs(a.spec.init.b - b.spec.init.b) <= 1e-12 &&
         a.spec.mode != AuxMode::adiabatic && b.spec.mode != AuxMode::adiabatic;
}

double max_abs_f_excess(const DecoherenceSeries& s) {
  double worst = -1.0;
  for (const complexd& f : s.F) worst = std::max(worst, std::abs(f) - 1.0);
  return worst;
}

Trajectory oracle_trajectory(const PreparedScenario& prep, std::size_t branch, double T) {
  const PreparedBranch& pb = prep.branches[branch];
  const cvector psi0 = lr_state(prep.rep, pb.sol, pb.ph, prep.lambda, 0);
  Trajectory traj = propagate(pb.oracle_h, psi0, T, prep.step, pb.spec.label);
  traj.initial_state = "V(0)|lambda>";
  return traj;
}

std::vector<double> half_integer_js(double j_max) {
  std::vector<double> js;
  for (long twoj = 1; twoj <= std::lround(2.0 * j_max); ++twoj)
    js.push_back(0.5 * static_cast<double>(twoj));
  return js;
}

double scan_delta(const Scenario& sc, const PreparedScenario& prep) {
  if (sc.scan && sc.scan->delta) return *sc.scan->delta;
  if (prep.branches.size() < 2)
    throw config_error("[scan]: delta required when fewer than two branches exist");
  const double ti = evaluate(prep.branches[0].spec.protocol, 0.0).theta;
  const double tj = evaluate(prep.branches[1].spec.protocol, 0.0).theta;
  return ti - tj;
}

void write_run_meta(const std::filesystem::path& path, const Scenario& sc,
                    const PreparedScenario& prep) {
  std::ofstream out = open_out(path);
  out << "lambda = " << format_float(prep.lambda) << (sc.lambda ? "" : " (default m*j)")
      << "\n";
  out << "step = " << format_float(prep.step) << "\n";
  for (const PreparedBranch& pb : prep.branches) {
    out << "branch " << pb.spec.label << ": mode=" << to_string(pb.spec.mode)
        << " a0=" << format_float(pb.spec.init.a) << " b0=" << format_float(pb.spec.init.b)
        << (pb.spec.explicit_init ? " (explicit)" : " (default theta(0), phi(0))") << "\n";
  }
}

}  // namespace

int run_scenario(const Scenario& sc, const RunOptions& opts) {
  const std::filesystem::path outdir = resolve_output_dir(sc, opts);
  std::filesystem::create_directories(outdir);
  VerificationReport report;

  try {
    const PreparedScenario prep = prepare_scenario(sc, opts);
    write_run_meta(outdir / "run_meta.txt", sc, prep);

    for (std::size_t k = 0; k < prep.branches.size(); ++k) {
      const PreparedBranch& pb = prep.branches[k];
      if (k == 0) {
        write_aux_csv(outdir / "aux.csv", pb.sol);
        write_phases_csv(outdir / "phases.csv", pb.ph);
      } else {
        write_aux_csv(outdir / ("aux_" + pb.spec.label + ".csv"), pb.sol);
        write_phases_csv(outdir / ("phases_" + pb.spec.label + ".csv"), pb.ph);
      }
    }

    if (prep.branches.size() >= 2) {
      const PreparedBranch& bi = prep.branches[0];
      const PreparedBranch& bj = prep.branches[1];

      std::optional<Trajectory> ti, tj;
      const auto ensure_oracle = [&] {
        if (!ti) {
          ti = oracle_trajectory(prep, 0, sc.T);
          tj = oracle_trajectory(prep, 1, sc.T);
        }
      };

      std::vector<DecoherenceSeries> all;
      for (Route route : sc.routes) {
        switch (route) {
          case Route::matrix_element:
            all.push_back(
                decoherence_matrix_element(prep.rep, bi.sol, bj.sol, prep.lambda));
            break;
          case Route::closed_form:
            all.push_back(
                decoherence_closed_form_series(prep.rep, bi.sol, bj.sol, prep.lambda));
            break;
          case Route::adiabatic_formula:
            all.push_back(
                adiabatic_formula_series(prep.rep, bi.sol, bj.sol, prep.lambda));
            break;
          case Route::oracle_overlap: {
            ensure_oracle();
            DecoherenceSeries s;
            s.times = bi.sol.times;
            s.route = Route::oracle_overlap;
            s.branch_pair = {bi.spec.label, bj.spec.label};
            s.lambda = prep.lambda;
            s.j_spin = prep.rep.j;
            s.mu = prep.lambda / prep.rep.spec.m;
            const std::vector<complexd> ov = overlap_series(*ti, *tj);
            s.F.reserve(ov.size());
            for (std::size_t k = 0; k < ov.size(); ++k)
              s.F.push_back(
                  std::exp(complexd(0.0, bj.ph.phi_total[k] - bi.ph.phi_total[k])) * ov[k]);
            all.push_back(std::move(s));
            break;
          }
        }
      }
      write_decoherence_csv(outdir / "decoherence.csv", all);

      for (const DecoherenceSeries& s : all) {
        report.checks.push_back({std::string("abs_F.") + to_string(s.route),
                                 max_abs_f_excess(s), sc.tol.abs_f_excess,
                                 max_abs_f_excess(s) <= sc.tol.abs_f_excess});
        if (shared_init(bi, bj)) {
          const double dev = std::abs(s.F.front() - 1.0);
          report.checks.push_back(
              {std::string("F_initial.") + to_string(s.route), dev, 1e-12, dev <= 1e-12});
        }
      }

      if (opts.dump_trajectories) {
        ensure_oracle();
        write_trajectory_csv(outdir / ("trajectory_" + bi.spec.label + ".csv"), *ti);
        write_trajectory_csv(outdir / ("trajectory_" + bj.spec.label + ".csv"), *tj);
      }
    }

    if (sc.scan) {
      const double delta = scan_delta(sc, prep);
      const ScanResult res = classical_limit_scan(delta, half_integer_js(sc.scan->j_max));
      write_scan_csv(outdir / "scan.csv", res);
      if (res.excluded_delta)
        report.checks.push_back(
            {"scan delta excluded (|F| stays 1)", delta, 0.0, true});
    }
  } catch (const singularity_error& e) {
    report.checks.push_back({"coordinate singularity", e.t, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  } catch (const step_size_error&) {
    report.checks.push_back({"step-size check", 0.0, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  } catch (const degenerate_branch_error&) {
    report.checks.push_back({"degenerate branch", 0.0, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  }

  write_report_csv(outdir / "report.csv", report);
  return report.overall_pass() ? kExitOk : kExitNumerical;
}

int verify_scenario(const Scenario& sc, const RunOptions& opts) {
  const std::filesystem::path outdir = resolve_output_dir(sc, opts);
  std::filesystem::create_directories(outdir);
  VerificationReport report;
  const Tolerances& tol = sc.tol;

  const auto add = [&report](const std::string& name, double measured, double threshold) {
    report.checks.push_back({name, measured, threshold, measured <= threshold});
  };

  try {
    const PreparedScenario prep = prepare_scenario(sc, opts);

    const double scale = std::max(
        {max_abs(prep.rep.a_plus), max_abs(prep.rep.a_minus), max_abs(prep.rep.a_z), 1.0});
    add("representation_commutators", commutator_residual(prep.rep), tol.commutator * scale);

    std::vector<Trajectory> oracle_trajs;
    for (std::size_t k = 0; k < prep.branches.size(); ++k) {
      const PreparedBranch& pb = prep.branches[k];
      const std::string& label = pb.spec.label;

      add("invariant_residual." + label,
          invariant_residual(prep.rep, pb.spec.protocol, pb.sol), tol.invariant_residual);

      double conj_defect = 0.0;
      const std::size_t samples = std::min<std::size_t>(100, pb.sol.size());
      for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t idx = (s * (pb.sol.size() - 1)) / std::max<std::size_t>(1, samples - 1);
        conj_defect = std::max(conj_defect,
                               displacement_conjugation_defect(prep.rep, pb.sol.at(idx)));
      }
      add("displacement_conjugation." + label, conj_defect, tol.displacement_conjugation);

      const TransformedHamiltonianDefect hv =
          transformed_hamiltonian_defect(prep.rep, pb.spec.protocol, pb.sol, 100);
      add("hv_offdiagonal." + label, hv.max_offdiagonal, tol.hv_offdiagonal);
      add("hv_coefficient." + label, hv.max_diagonal_error, tol.hv_coefficient);

      const Trajectory lr = lr_trajectory(prep.rep, pb.sol, pb.ph, prep.lambda);
      double h_max = 0.0;
      for (double t : pb.sol.times)
        h_max = std::max(h_max, hamiltonian_norm(evaluate(pb.spec.protocol, t),
                                                 prep.rep.spec, prep.rep.j));
      const double resid = schrodinger_residual(lr, pb.oracle_h);
      add("lr_schrodinger." + label, resid / std::max(h_max, 1e-300), tol.lr_schrodinger);

      const Trajectory oracle = oracle_trajectory(prep, k, sc.T);
      double overlap_loss = 0.0;
      double aligned_diff = 0.0;
      for (std::size_t t = 0; t < oracle.size(); ++t) {
        const complexd ov = oracle.states[t].dot(lr.states[t]);
        overlap_loss = std::max(overlap_loss, 1.0 - std::abs(ov));
        // Remove the global phase before differencing the states.
        const complexd align = std::abs(ov) > 0.0 ? ov / std::abs(ov) : complexd(1.0);
        aligned_diff = std::max(
            aligned_diff, (lr.states[t] - cvector(align * oracle.states[t])).norm());
      }
      add("oracle_overlap." + label, overlap_loss, tol.oracle_overlap);
      add("oracle_state_diff." + label, aligned_diff,
          std::sqrt(2.0 * tol.oracle_overlap));
      oracle_trajs.push_back(oracle);
    }

    if (prep.branches.size() >= 2) {
      const PreparedBranch& bi = prep.branches[0];
      const PreparedBranch& bj = prep.branches[1];
      const DecoherenceSeries f =
          decoherence_matrix_element(prep.rep, bi.sol, bj.sol, prep.lambda);
      const DecoherenceSeries f_rev =
          decoherence_matrix_element(prep.rep, bj.sol, bi.sol, prep.lambda);

      double sym = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k)
        sym = std::max(sym, std::abs(f.F[k] - std::conj(f_rev.F[k])));
      add("f_symmetry", sym, tol.f_symmetry);
      add("abs_F", max_abs_f_excess(f), tol.abs_f_excess);
      add("overlap_vs_factor",
          detector_overlap_vs_factor(oracle_trajs[0], oracle_trajs[1], bi.ph, bj.ph, f),
          tol.overlap_vs_factor);
    }
  } catch (const singularity_error& e) {
    report.checks.push_back({"coordinate singularity", e.t, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  } catch (const step_size_error&) {
    report.checks.push_back({"step-size check", 0.0, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  } catch (const degenerate_branch_error&) {
    report.checks.push_back({"degenerate branch", 0.0, 0.0, false});
    write_report_csv(outdir / "report.csv", report);
    return kExitNumerical;
  }

  write_report_csv(outdir / "report.csv", report);
  return report.overall_pass() ? kExitOk : kExitNumerical;
}

int scan_scenario(const Scenario& sc, const RunOptions& opts,
                  std::optional<double> delta_override,
                  std::optional<double> j_max_override) {
  const std::filesystem::path outdir = resolve_output_dir(sc, opts);
  std::filesystem::create_directories(outdir);

  double j_max = 25.0;
  if (sc.scan) j_max = sc.scan->j_max;
  if (j_max_override) j_max = *j_max_override;
  if (!is_half_integer(j_max))
    throw config_error("scan: jmax must be a positive half-integer");

  double delta = 0.0;
  if (delta_override) {
    delta = *delta_override;
  } else {
    const PreparedScenario prep = prepare_scenario(sc, opts);
    delta = scan_delta(sc, prep);
  }

  const ScanResult res = classical_limit_scan(delta, half_integer_js(j_max));
  write_scan_csv(outdir / "scan.csv", res);
  return kExitOk;
}

}  // namespace lrsim
