#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stable_est/bounds.hpp"
#include "stable_est/core.hpp"
#include "stable_est/dpbridge.hpp"
#include "stable_est/estimators.hpp"
#include "stable_est/risk.hpp"
#include "stable_est/stability.hpp"
#include "stable_est/svg.hpp"
#include "stable_est/wavelet.hpp"

namespace stable_est::cli {

using nlohmann::json;

inline json jnum(double v) {
  if (std::isfinite(v)) return json(v);
  return v > 0.0 ? json("inf") : json("-inf");
}

inline double parse_order(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kInf;
  double p = std::stod(s);
  if (!(p >= 1.0)) throw std::invalid_argument("order p must be >= 1 or 'inf'");
  return p;
}

struct EstimatorFlags {
  double p = kInf;
  int n = 100;
  double r = 1.0;
  double beta = 0.1;
  double k = 2.0;
  int s = 5;
  int d = 1;
  double nu = 0.5;
  double x0 = 0.3;
  double sigma = 0.2;
  double m_f = 1.0;
  std::string basis = "haar";
};

inline WaveletBasis make_basis(const std::string& name) {
  if (name == "haar") return make_haar();
  if (name == "db2") return make_daubechies(2);
  if (name == "db3") return make_daubechies(3);
  throw std::invalid_argument("unknown basis '" + name + "'");
}

inline WaveletEstimatorSpec wavelet_spec_from(const EstimatorFlags& f, WaveletMode mode) {
  WaveletEstimatorSpec spec;
  spec.basis = make_basis(f.basis);
  spec.x0 = f.x0;
  spec.nu = f.nu;
  spec.n = f.n;
  spec.beta_n = f.beta;
  spec.mode = mode;
  spec.sigma_assumed = f.sigma;
  spec.m_f_assumed = f.m_f;
  return spec;
}

inline EstimatorHandle make_estimator(const std::string& id, const EstimatorFlags& f) {
  if (id == "sample-mean") return make_sample_mean(f.d);
  if (id == "bounded-worst") return exact_worst_bounded(f.n, f.r, f.beta);
  if (id == "bounded-avg") return avg_bounded(f.n, f.r, f.beta);
  if (id == "bounded-naive") return naive_avg_bounded(f.n, f.r, f.beta);
  if (id == "bounded-shrinkage") {
    BoundedMeanSpec spec;
    spec.r = f.r;
    spec.n = f.n;
    spec.beta_n = f.beta;
    spec.order = make_order(f.p);
    spec.d = f.d;
    return shrinkage_bounded(spec, true);
  }
  if (id == "heavy-worst" || id == "heavy-avg") {
    HeavyTailSpec spec;
    spec.r = f.r;
    spec.k = f.k;
    spec.n = f.n;
    spec.beta_n = f.beta;
    spec.mode = id == "heavy-worst" ? StabilityOrder::worst() : StabilityOrder::average();
    return heavy_tail_estimator(spec);
  }
  if (id == "sparse-soft") {
    SparseMeanSpec spec;
    spec.r = f.r;
    spec.s = f.s;
    spec.d = f.d;
    spec.n = f.n;
    spec.beta_n = f.beta;
    return sparse_soft(spec);
  }
  if (id == "wavelet-worst") return wavelet_estimator(wavelet_spec_from(f, WaveletMode::worst));
  if (id == "wavelet-avg") return wavelet_estimator(wavelet_spec_from(f, WaveletMode::average));
  if (id == "wavelet-baseline") return wavelet_estimator(wavelet_spec_from(f, WaveletMode::baseline));
  throw std::invalid_argument("unknown estimator '" + id + "'");
}

inline SearchDomain domain_for(const std::string& estimator_id, const EstimatorFlags& f) {
  SearchDomain dom;
  dom.n = f.n;
  dom.r = f.r;
  dom.d = f.d;
  if (estimator_id.rfind("sparse", 0) == 0) {
    // the sparse data class bounds coordinates individually
    dom.norm_kind = NormKind::linf;
  }
  if (estimator_id.rfind("wavelet", 0) == 0) {
    dom.kind = DatasetKind::regression_pairs;
    dom.d = 2;
    double ylim = 4.0 * (f.sigma + f.m_f) * std::sqrt(std::log(static_cast<double>(f.n)));
    dom.box = {{0.0, 1.0}, {-ylim, ylim}};
  }
  return dom;
}

inline void add_estimator_flags(CLI::App* sub, EstimatorFlags& f, std::string& p_str) {
  sub->add_option("--p", p_str, "stability order: a real >= 1 or 'inf'");
  sub->add_option("--r", f.r, "domain / moment radius");
  sub->add_option("--beta", f.beta, "stability budget beta_n");
  sub->add_option("--k", f.k, "heavy-tail moment order");
  sub->add_option("--s", f.s, "sparsity");
  sub->add_option("--d", f.d, "ambient dimension");
  sub->add_option("--nu", f.nu, "smoothness exponent");
  sub->add_option("--x0", f.x0, "evaluation point");
  sub->add_option("--sigma", f.sigma, "regression noise level");
  sub->add_option("--m-f", f.m_f, "assumed sup-norm of the regression function");
  sub->add_option("--basis", f.basis, "wavelet basis: haar | db2 | db3");
}

inline json flags_json(const EstimatorFlags& f) {
  return json{{"p", std::isinf(f.p) ? json("inf") : json(f.p)},
              {"n", f.n},
              {"r", f.r},
              {"beta", f.beta},
              {"k", f.k},
              {"s", f.s},
              {"d", f.d},
              {"nu", f.nu},
              {"x0", f.x0},
              {"sigma", f.sigma},
              {"m_f", f.m_f},
              {"basis", f.basis}};
}

inline void emit(std::ostream& out, const json& result, const std::string& out_path) {
  out << result.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot open " + out_path);
    file << result.dump(2) << "\n";
  }
}

// full command surface; returns the process exit code
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout) {
  CLI::App app{"stability-constrained estimators: certification, risk sweeps, bounds, and plots"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags override it");

  EstimatorFlags f;
  std::string p_str = "inf";
  std::string estimator_id, out_path, data_path, spec_path, budget_path, witness_path;
  std::uint64_t seed_value = 1;

  // certify
  auto* certify = app.add_subcommand("certify", "search for the worst leave-one-out stability of an estimator");
  certify->add_option("--estimator", estimator_id, "estimator id")->required();
  certify->add_option("--n", f.n, "sample size")->required();
  add_estimator_flags(certify, f, p_str);
  certify->add_option("--seed", seed_value, "master seed");
  certify->add_option("--budget-file", budget_path, "JSON file with search budget fields");
  certify->add_option("--out", out_path, "write the JSON report here as well");
  certify->add_option("--witness-out", witness_path, "witness dataset CSV path");
  bool assert_flag = false;
  certify->add_flag("--assert", assert_flag, "exit 3 when the claimed budget is violated");
  certify->footer(
      "output schema: JSON {schema_version, order: {p}, found_sup, witness_csv_path,\n"
      "  budget_claim, budget_satisfied, evaluations, config}");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "run an estimator on a dataset CSV");
  eval_cmd->add_option("--estimator", estimator_id, "estimator id")->required();
  eval_cmd->add_option("--data", data_path, "dataset CSV (x0..xk header, or x,y for regression)")->required();
  eval_cmd->add_option("--spec", spec_path, "JSON file of estimator parameters; flags override it");
  eval_cmd->add_option("--n", f.n, "sample size used to parametrize the estimator");
  add_estimator_flags(eval_cmd, f, p_str);
  eval_cmd->add_option("--seed", seed_value, "master seed");
  eval_cmd->add_option("--out", out_path, "write the JSON result here as well");
  eval_cmd->footer("output schema: JSON {schema_version, estimate: [..], spec_echo, certified, config}");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "risk curve over a beta_n grid");
  std::string problem = "bounded";
  double grid_lo = 0.0, grid_hi = 0.0;
  int points = 30, reps = 2000, family_points = 41;
  sweep_cmd->add_option("--problem", problem, "bounded | heavy | sparse | nonparametric");
  sweep_cmd->add_option("--n", f.n, "sample size")->required();
  add_estimator_flags(sweep_cmd, f, p_str);
  sweep_cmd->add_option("--grid-lo", grid_lo, "lowest beta_n (default r/(50n))");
  sweep_cmd->add_option("--grid-hi", grid_hi, "highest beta_n (default 10r/n)");
  sweep_cmd->add_option("--points", points, "grid size");
  sweep_cmd->add_option("--reps", reps, "Monte Carlo replicates per grid point");
  sweep_cmd->add_option("--family-points", family_points, "distribution-family grid size");
  sweep_cmd->add_option("--seed", seed_value, "master seed");
  sweep_cmd->add_option("--out", out_path, "curve CSV path")->required();
  sweep_cmd->footer(
      "output: CSV with comment metadata, then columns\n"
      "  beta,sup_mse,ci,bound_lower,bound_upper,argmax_param");

  // lower
  auto* lower_cmd = app.add_subcommand("lower", "minimax lower bound values at one (n, beta_n)");
  double delta_theta = 0.0;
  int eta_points = 200;
  lower_cmd->add_option("--problem", problem, "bounded (other families report the generic bounds)");
  lower_cmd->add_option("--n", f.n, "sample size")->required();
  add_estimator_flags(lower_cmd, f, p_str);
  lower_cmd->add_option("--delta-theta", delta_theta, "mean separation of the witness pair (default 2r)");
  lower_cmd->add_option("--eta-points", eta_points, "mixing grid size");
  lower_cmd->add_option("--out", out_path, "write the JSON result here as well");
  lower_cmd->footer(
      "output schema: JSON {schema_version, general, linear, value, argmax_eta,\n"
      "  loosened_avg, sharper_avg?, exact_worst?, config}");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "exact-vs-bound checks for the binomial lemmas and the coupling");
  std::string which;
  double q = 0.5, moment = 1.0, theta1 = -0.5, theta2 = 0.5;
  int draws = 20000;
  oracle_cmd->add_option("--which", which, "binom-log | binom-ratio | binom-moment | coupling")->required();
  oracle_cmd->add_option("--n", f.n, "binomial size / coupling draw count")->required();
  oracle_cmd->add_option("--q", q, "binomial success probability");
  add_estimator_flags(oracle_cmd, f, p_str);
  oracle_cmd->add_option("--m", moment, "moment order for binom-moment");
  oracle_cmd->add_option("--theta1", theta1, "coupling: first binary mean");
  oracle_cmd->add_option("--theta2", theta2, "coupling: second binary mean");
  oracle_cmd->add_option("--draws", draws, "coupling: sample pairs");
  oracle_cmd->add_option("--seed", seed_value, "master seed");
  oracle_cmd->add_option("--out", out_path, "write the JSON result here as well");
  oracle_cmd->footer("output schema: JSON {schema_version, which, exact, bound, pass, config}; exit 3 when pass=false");

  // dp
  auto* dp_cmd = app.add_subcommand("dp", "privacy bridge: mechanism, conversions, curves, audit");
  std::string action;
  double eps = 1.0;
  int bins = 60;
  int dp_reps = 100000;
  bool dp_assert = false;
  dp_cmd->add_option("--action", action, "mechanism | convert | curves | audit")->required();
  dp_cmd->add_option("--eps", eps, "privacy budget");
  dp_cmd->add_option("--n", f.n, "sample size");
  add_estimator_flags(dp_cmd, f, p_str);
  dp_cmd->add_option("--estimator", estimator_id, "base estimator id (default bounded-worst)");
  dp_cmd->add_option("--problem", problem, "curves: bounded | heavy");
  dp_cmd->add_option("--grid-lo", grid_lo, "curves: lowest grid value");
  dp_cmd->add_option("--grid-hi", grid_hi, "curves: highest grid value");
  dp_cmd->add_option("--points", points, "curves: grid size");
  dp_cmd->add_option("--reps", dp_reps, "audit: mechanism draws per dataset");
  dp_cmd->add_option("--bins", bins, "audit: histogram bins");
  dp_cmd->add_option("--data", data_path, "mechanism: dataset CSV to evaluate");
  dp_cmd->add_option("--seed", seed_value, "master seed");
  dp_cmd->add_flag("--assert", dp_assert, "audit: exit 3 on fail");
  dp_cmd->add_option("--out", out_path, "write the JSON result here as well");
  dp_cmd->footer(
      "output schema: JSON per action; convert -> {beta, small_eps, simplified_beta},\n"
      "  audit -> {eps, max_log_ratio, slack, bins_used, reps, pass}");

  // wavelet-demo
  auto* wav_cmd = app.add_subcommand("wavelet-demo", "pointwise wavelet regression on a sampled fixture");
  std::string mode_str = "worst";
  std::string coeff_path = "coeffs.csv";
  wav_cmd->add_option("--n", f.n, "sample size")->required();
  add_estimator_flags(wav_cmd, f, p_str);
  wav_cmd->add_option("--mode", mode_str, "worst | avg | baseline");
  wav_cmd->add_option("--seed", seed_value, "master seed");
  wav_cmd->add_option("--coeff-out", coeff_path, "coefficient table CSV path");
  wav_cmd->add_option("--out", out_path, "write the JSON result here as well");
  wav_cmd->footer("output schema: JSON {schema_version, fhat_x0, f_x0, L, T, coeff_table_csv, config}");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "render sweep CSVs as a deterministic log-log SVG");
  std::vector<std::string> in_paths;
  std::string title;
  double s_for_threshold = 5.0;
  plot_cmd->add_option("--in", in_paths, "curve CSV (repeatable)")->required()->expected(-1);
  plot_cmd->add_option("--out", out_path, "SVG path")->required();
  plot_cmd->add_option("--title", title, "plot title");
  plot_cmd->add_option("--threshold-s", s_for_threshold, "sparsity used for the sparse threshold marker");
  plot_cmd->footer("output: SVG file; one polyline per curve plus dashed catalog threshold markers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    CLI::App* shown = &app;
    for (auto* sub : app.get_subcommands()) shown = sub;
    out << shown->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    f.p = parse_order(p_str);
    Seed seed{seed_value};

    if (app.got_subcommand(certify)) {
      EstimatorHandle est = make_estimator(estimator_id, f);
      SearchDomain dom = domain_for(estimator_id, f);
      SearchBudget budget;
      if (!budget_path.empty()) {
        std::ifstream bf(budget_path);
        if (!bf) throw std::runtime_error("cannot open " + budget_path);
        json j = json::parse(bf);
        if (j.contains("random_restarts")) budget.random_restarts = j["random_restarts"];
        if (j.contains("ascent_iters")) budget.ascent_iters = j["ascent_iters"];
        if (j.contains("corner_enumeration_limit")) budget.corner_enumeration_limit = j["corner_enumeration_limit"];
        if (j.contains("per_coordinate_grid")) budget.per_coordinate_grid = j["per_coordinate_grid"];
      }
      std::optional<double> claim;
      if (certify->count("--beta")) claim = f.beta;
      else if (est.certified) claim = est.certified->beta;
      StabilityReport report = certify_sup(est, dom, make_order(f.p), budget, seed, claim);
      if (witness_path.empty()) witness_path = "witness.csv";
      write_csv(report.witness, witness_path);
      json result{{"schema_version", 1},
                  {"order", {{"p", std::isinf(report.order.p) ? json("inf") : json(report.order.p)}}},
                  {"found_sup", jnum(report.found_sup)},
                  {"witness_csv_path", witness_path},
                  {"budget_satisfied", report.budget_satisfied},
                  {"evaluations", report.evaluations},
                  {"config", flags_json(f)}};
      if (report.budget_claim) result["budget_claim"] = *report.budget_claim;
      if (report.witness_pair) {
        std::string pair_path = witness_path + ".pair.csv";
        write_csv(report.witness_pair->second, pair_path);
        result["witness_pair_csv_path"] = pair_path;
      }
      emit(out, result, out_path);
      return assert_flag && !report.budget_satisfied ? 3 : 0;
    }

    if (app.got_subcommand(eval_cmd)) {
      if (!spec_path.empty()) {
        std::ifstream sf(spec_path);
        if (!sf) throw std::runtime_error("cannot open " + spec_path);
        json j = json::parse(sf);
        auto take_d = [&](const char* key, double& slot, const char* flag) {
          if (j.contains(key) && !eval_cmd->count(flag)) slot = j[key];
        };
        auto take_i = [&](const char* key, int& slot, const char* flag) {
          if (j.contains(key) && !eval_cmd->count(flag)) slot = j[key];
        };
        take_i("n", f.n, "--n");
        take_d("r", f.r, "--r");
        take_d("beta", f.beta, "--beta");
        take_d("k", f.k, "--k");
        take_i("s", f.s, "--s");
        take_i("d", f.d, "--d");
        take_d("nu", f.nu, "--nu");
        take_d("x0", f.x0, "--x0");
        take_d("sigma", f.sigma, "--sigma");
        take_d("m_f", f.m_f, "--m-f");
        if (j.contains("p") && !eval_cmd->count("--p"))
          f.p = j["p"].is_string() ? parse_order(j["p"].get<std::string>()) : j["p"].get<double>();
        if (j.contains("basis") && !eval_cmd->count("--basis")) f.basis = j["basis"].get<std::string>();
      }
      EstimatorHandle est = make_estimator(estimator_id, f);
      Dataset ds = read_csv(data_path);
      ds.domain_radius = f.r;
      std::vector<double> estimate = est.evaluate(ds, seed);
      json result{{"schema_version", 1},
                  {"estimate", estimate},
                  {"spec_echo", flags_json(f)},
                  {"certified", est.certified ? json{{"p", std::isinf(est.certified->p) ? json("inf") : json(est.certified->p)},
                                                     {"beta", est.certified->beta}}
                                              : json(nullptr)},
                  {"config", flags_json(f)}};
      emit(out, result, out_path);
      return 0;
    }

    if (app.got_subcommand(sweep_cmd)) {
      SweepConfig cfg;
      cfg.problem = problem;
      cfg.p = f.p;
      cfg.n = f.n;
      cfg.r = f.r;
      cfg.k = f.k;
      cfg.s = f.s;
      cfg.d = f.d;
      cfg.nu = f.nu;
      cfg.x0 = f.x0;
      cfg.sigma = f.sigma;
      cfg.reps = reps;
      cfg.grid_points = family_points;
      cfg.seed = seed;
      double lo = grid_lo > 0.0 ? grid_lo : cfg.r / (50.0 * cfg.n);
      double hi = grid_hi > 0.0 ? grid_hi : 10.0 * cfg.r / cfg.n;
      cfg.beta_grid = logspace(lo, hi, points);
      RiskCurve curve = sweep(cfg);
      write_curve_csv(curve, out_path);
      json result{{"schema_version", 1},
                  {"out", out_path},
                  {"rows", curve.rows.size()},
                  {"config", flags_json(f)}};
      result["config"]["problem"] = problem;
      result["config"]["reps"] = reps;
      result["config"]["points"] = points;
      result["config"]["grid_lo"] = lo;
      result["config"]["grid_hi"] = hi;
      out << result.dump(2) << "\n";
      return 0;
    }

    if (app.got_subcommand(lower_cmd)) {
      double dt = delta_theta > 0.0 ? delta_theta : 2.0 * f.r;
      LpLowerBound lb = lower_lp(dt, f.n, f.p, f.beta, true, linspace(0.0, 0.5, eta_points));
      json result{{"schema_version", 1},
                  {"problem", problem},
                  {"delta_theta", dt},
                  {"general", jnum(lb.general)},
                  {"linear", lb.linear ? jnum(*lb.linear) : json(nullptr)},
                  {"value", jnum(lb.value)},
                  {"argmax_eta", lb.argmax_eta ? json(*lb.argmax_eta) : json(nullptr)},
                  {"loosened_avg", jnum(loosened_avg_lower(dt, f.n, f.beta))},
                  {"config", flags_json(f)}};
      if (f.p == 1.0)
        result["sharper_avg"] = jnum(lower_avg_sharper(dt, f.n, f.beta, linspace(0.25, 0.5, eta_points)));
      if (std::isinf(f.p) && problem == "bounded")
        result["exact_worst"] = jnum(exact_risk_worst_bounded(f.n, f.r, f.beta));
      emit(out, result, out_path);
      return 0;
    }

    if (app.got_subcommand(oracle_cmd)) {
      double exact = 0.0, bound = 0.0;
      bool pass = false;
      if (which == "binom-log") {
        OraclePair o = binom_log_oracle({f.n, q, f.p});
        exact = o.exact;
        bound = o.bound;
        pass = exact <= bound + 1e-12 * std::max(1.0, std::fabs(bound));
      } else if (which == "binom-ratio") {
        OraclePair o = binom_ratio_oracle({f.n, q, std::isinf(f.p) ? 1.0 : f.p});
        exact = o.exact;
        bound = o.bound;
        pass = exact <= bound + 1e-12 * std::max(1.0, std::fabs(bound));
      } else if (which == "binom-moment") {
        OraclePair o = binom_moment_check(f.n, q, moment);
        exact = o.exact;
        bound = o.bound;
        pass = exact <= bound + 1e-12 * std::max(1.0, std::fabs(bound));
      } else if (which == "coupling") {
        DiscreteDist d1 = discretize(BinaryDist{f.r, 0.5 * (1.0 + theta1 / f.r)});
        DiscreteDist d2 = discretize(BinaryDist{f.r, 0.5 * (1.0 + theta2 / f.r)});
        double tv = tv_discrete(d1, d2);
        auto [a, b] = maximal_coupling_sample(d1, d2, draws, seed);
        double mism = static_cast<double>(hamming_distance(a, b)) / draws;
        exact = tv;
        bound = mism;
        pass = std::fabs(mism - tv) <= 4.0 * std::sqrt(std::max(tv * (1.0 - tv), 1e-12) / draws) + 1e-9;
      } else {
        throw std::invalid_argument("unknown oracle '" + which + "'");
      }
      json result{{"schema_version", 1}, {"which", which},      {"exact", jnum(exact)},
                  {"bound", jnum(bound)}, {"pass", pass},        {"config", flags_json(f)}};
      result["config"]["q"] = q;
      result["config"]["m"] = moment;
      emit(out, result, out_path);
      return pass ? 0 : 3;
    }

    if (app.got_subcommand(dp_cmd)) {
      PrivacyBudget budget{eps};
      if (action == "convert") {
        DpStability conv = dp_to_stability(budget, f.r);
        json result{{"schema_version", 1},
                    {"beta", conv.beta},
                    {"small_eps", conv.small_eps},
                    {"simplified_beta", conv.simplified_beta},
                    {"config", flags_json(f)}};
        result["config"]["eps"] = eps;
        emit(out, result, out_path);
        return 0;
      }
      if (action == "mechanism") {
        if (estimator_id.empty()) estimator_id = "bounded-worst";
        EstimatorHandle base = make_estimator(estimator_id, f);
        EstimatorHandle mech = laplace_mechanism(base, budget);
        json result{{"schema_version", 1},
                    {"scale", base.certified->beta / eps},
                    {"eps", eps},
                    {"certified", {{"p", "inf"}, {"beta", mech.certified->beta}}},
                    {"config", flags_json(f)}};
        result["config"]["eps"] = eps;
        if (!data_path.empty()) {
          Dataset ds = read_csv(data_path);
          ds.domain_radius = f.r;
          result["estimate"] = mech.evaluate(ds, seed);
        }
        emit(out, result, out_path);
        return 0;
      }
      if (action == "curves") {
        double lo = grid_lo > 0.0 ? grid_lo : 0.5 / f.n;
        double hi = grid_hi > 0.0 ? grid_hi : 5.0;
        BoundCurvePair curves = prop1_curves(problem, f.k, f.n, f.r, logspace(lo, hi, points));
        json dp_arr = json::array(), st_arr = json::array();
        for (const auto& pt : curves.dp)
          dp_arr.push_back({{"eps", pt.x}, {"lower", jnum(pt.lower)}, {"upper", jnum(pt.upper)}, {"argmin_beta", pt.arg}});
        for (const auto& pt : curves.stability)
          st_arr.push_back({{"beta", pt.x}, {"lower", jnum(pt.lower)}, {"upper", jnum(pt.upper)}, {"argmax_eps", pt.arg}});
        json result{{"schema_version", 1},
                    {"problem", curves.problem},
                    {"rate_only", curves.rate_only},
                    {"dp", dp_arr},
                    {"stability", st_arr},
                    {"config", flags_json(f)}};
        emit(out, result, out_path);
        return 0;
      }
      if (action == "audit") {
        if (estimator_id.empty()) estimator_id = "bounded-worst";
        EstimatorHandle base = make_estimator(estimator_id, f);
        EstimatorHandle mech = laplace_mechanism(base, budget);
        Dataset ds1;
        ds1.domain_radius = f.r;
        ds1.points.assign(f.n, std::vector<double>{-f.r});
        Dataset ds2 = replace_point(ds1, 0, std::vector<double>{f.r});
        AuditConfig cfg;
        cfg.bins = bins;
        cfg.reps = dp_reps;
        DpAuditReport report = dp_audit(mech, ds1, ds2, budget, cfg, seed);
        json result{{"schema_version", 1},
                    {"eps", report.eps},
                    {"max_log_ratio", jnum(report.max_log_ratio)},
                    {"slack", report.slack},
                    {"bins_used", report.bins_used},
                    {"reps", report.reps},
                    {"pass", report.pass},
                    {"config", flags_json(f)}};
        result["config"]["eps"] = eps;
        result["config"]["bins"] = bins;
        result["config"]["reps"] = dp_reps;
        emit(out, result, out_path);
        return dp_assert && !report.pass ? 3 : 0;
      }
      throw std::invalid_argument("unknown dp action '" + action + "'");
    }

    if (app.got_subcommand(wav_cmd)) {
      WaveletMode mode = mode_str == "worst"  ? WaveletMode::worst
                         : mode_str == "avg"  ? WaveletMode::average
                         : mode_str == "baseline" ? WaveletMode::baseline
                                                  : throw std::invalid_argument("unknown mode '" + mode_str + "'");
      auto fixtures = besov_test_functions(f.nu, 1, make_basis(f.basis).regularity);
      EstimatorFlags wf = f;
      if (!wav_cmd->count("--m-f")) wf.m_f = fixtures[0].sup_norm;
      WaveletEstimatorSpec spec = wavelet_spec_from(wf, mode);
      EstimatorHandle est = wavelet_estimator(spec);
      DistributionSpec dist;
      dist.v = RegressionDist{fixtures[0].f, f.sigma, f.x0};
      Dataset ds = sample(dist, f.n, seed);
      double fhat = est.evaluate(ds, seed)[0];
      int L = mode == WaveletMode::worst ? spec.level_cap() : spec.l_opt();
      double clip_t = mode == WaveletMode::worst ? spec.clip_level() : kInf;
      WaveletCoeffs coeffs = empirical_coeffs(spec.basis, ds, L, clip_t);
      {
        std::ofstream cf(coeff_path);
        if (!cf) throw std::runtime_error("cannot open " + coeff_path);
        cf << std::setprecision(17);
        cf << "# schema_version=1\nkind,l,k,f_hat,s\n";
        for (const auto& e : coeffs.entries)
          cf << (e.father ? "father" : "mother") << ',' << e.l << ',' << e.k << ',' << e.f_hat_t << ',' << e.s << "\n";
      }
      json result{{"schema_version", 1},
                  {"fhat_x0", fhat},
                  {"f_x0", fixtures[0].f(f.x0)},
                  {"L", L},
                  {"T", jnum(clip_t)},
                  {"coeff_table_csv", coeff_path},
                  {"config", flags_json(wf)}};
      result["config"]["mode"] = mode_str;
      emit(out, result, out_path);
      return 0;
    }

    if (app.got_subcommand(plot_cmd)) {
      std::vector<SvgCurve> curves;
      std::vector<SvgMarker> markers;
      auto catalog = phase_catalog();
      for (const auto& path : in_paths) {
        RiskCurve curve = read_curve_csv(path);
        if (curve.rows.empty()) throw std::runtime_error("empty-curve: " + path);
        SvgCurve sc;
        sc.label = curve.problem + " p=" + order_to_string(curve.p);
        for (const auto& row : curve.rows) sc.points.push_back({row.beta_n, row.sup_mse});
        curves.push_back(sc);
        std::string cat_problem = curve.problem == "heavy" ? "heavy-tail" : curve.problem;
        std::string cat_order = std::isinf(curve.p) ? "worst" : curve.p == 1.0 ? "average" : "lp";
        for (const auto& entry : catalog) {
          if (entry.problem != cat_problem || entry.order != cat_order) continue;
          PhaseQuery query;
          query.n = curve.n;
          query.r = curve.r;
          query.s = s_for_threshold;
          markers.push_back({entry.threshold_expr, entry.threshold(query)});
        }
      }
      write_loglog_svg(out_path, curves, markers, title.empty() ? "witnessed sup-risk" : title, "beta_n",
                       "sup MSE");
      json result{{"schema_version", 1}, {"out", out_path}, {"curves", curves.size()}, {"markers", markers.size()}};
      out << result.dump(2) << "\n";
      return 0;
    }

    throw std::invalid_argument("unknown-subcommand");
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout) {
  std::vector<const char*> argv;
  argv.push_back("stable-est");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out);
}

}  // namespace stable_est::cli
