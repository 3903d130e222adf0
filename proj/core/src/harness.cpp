#include "saddle/harness.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "saddle/csv.hpp"
#include "saddle/errors.hpp"
#include "saddle/parallel.hpp"
#include "saddle/rng.hpp"
#include "saddle/spectral.hpp"

namespace saddle {

namespace {

std::vector<std::string> indexed_columns(const std::string& prefix, Eigen::Index d) {
  std::vector<std::string> cols;
  for (Eigen::Index i = 1; i <= d; ++i) cols.push_back(prefix + std::to_string(i));
  return cols;
}

void cells(CsvWriter& w, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) w.cell(v(i));
}

std::optional<Vector> first_strict_saddle(const Objective& obj) {
  for (const Vector& c : obj.critical_points) {
    if (classify_critical_point(obj, c).tag == CriticalTag::strict_saddle) return c;
  }
  return std::nullopt;
}

}  // namespace

bool is_saddle_hit(const Method& method, const Objective& obj, const TrajectoryRecord& rec, double radius) {
  if (rec.terminal == Terminal::escaped_region || rec.terminal == Terminal::step_error) return false;
  if (obj.critical_points.empty()) {
    return rec.terminal == Terminal::converged_to_point && rec.limit_class &&
           rec.limit_class->tag == CriticalTag::strict_saddle;
  }
  for (const Vector& c : obj.critical_points) {
    if ((rec.final_point - c).norm() >= radius) continue;
    if (method.classify(obj, c, ClassifyTolerances{}).tag == CriticalTag::strict_saddle) return true;
  }
  return false;
}

Vector draw_initial_point(const ExperimentConfig& cfg, const Objective& obj, std::int64_t trial) {
  Rng rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
  Vector x(obj.dimension);
  for (Eigen::Index i = 0; i < obj.dimension; ++i) {
    const auto& [lo, hi] = cfg.init_box[static_cast<std::size_t>(i)];
    x(i) = rng.uniform(lo, hi);
  }
  if (cfg.init_subspace == "stable") {
    const auto saddle = first_strict_saddle(obj);
    if (!saddle) throw ConfigError("init_subspace 'stable' needs an objective with a registered strict saddle");
    const SpectralSplit s = split(obj.hess(*saddle));
    x = *saddle + s.from_diagonal(s.P_plus * s.to_diagonal(x - *saddle));
  }
  if (cfg.method == MethodId::mirror_entropy) {
    x = x.cwiseAbs();
    const double total = x.sum();
    x = total > 0.0 ? Vector(x / total) : Vector::Constant(x.size(), 1.0 / static_cast<double>(x.size()));
  } else if (cfg.method == MethodId::manifold_sphere) {
    const double n = x.norm();
    if (n == 0.0) throw DomainError("initial point at the origin cannot be mapped onto the sphere");
    x /= n;
  }
  return x;
}

AvoidanceReport avoidance_experiment(const ExperimentConfig& cfg) {
  const Objective obj = build_objective(cfg.objective);
  const Method method = cfg.make_method();
  const RunOptions base = cfg.run_options();

  AvoidanceReport report;
  report.trials = cfg.trials;
  report.outcomes.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    TrialOutcome& out = report.outcomes[i];
    out.trial = static_cast<std::int64_t>(i);
    try {
      out.x0 = draw_initial_point(cfg, obj, out.trial);
      RunOptions opts = base;
      opts.seed = substream_seed(cfg.seed, i);
      opts.stride = std::max<std::int64_t>(opts.budget, 1);
      const TrajectoryRecord rec = run(method, obj, cfg.schedule, out.x0, opts);
      out.terminal = rec.terminal;
      out.k_final = rec.k_final;
      out.final_point = rec.final_point;
      out.error = rec.error;
      if (rec.limit_class) out.limit_tag = rec.limit_class->tag;
      out.saddle_hit = is_saddle_hit(method, obj, rec);
    } catch (const Error& e) {
      out.terminal = Terminal::step_error;
      out.error = e.what();
      out.saddle_hit = false;
    }
  });

  for (const TrialOutcome& o : report.outcomes) {
    ++report.terminal_counts[static_cast<std::size_t>(o.terminal)];
    if (o.terminal == Terminal::converged_to_point && o.limit_tag) ++report.limit_counts[static_cast<std::size_t>(*o.limit_tag)];
    if (o.saddle_hit) {
      ++report.saddle_hits;
      report.saddle_hit_inits.push_back(o.x0);
    }
  }
  return report;
}

Fig1Report fig1_experiment(const ExperimentConfig& cfg) {
  const Objective obj = fig1_objective();
  const Method method = Method::gd();
  RunOptions opts = cfg.run_options();

  Fig1Report report;
  report.x0 = Vector(2);
  if (cfg.x0.empty()) {
    report.x0 << 0.5, 0.5;
  } else {
    if (cfg.x0.size() != 2) throw ConfigError("fig1: x0 must have two coordinates");
    report.x0 << cfg.x0[0], cfg.x0[1];
  }

  const std::vector<std::pair<std::string, StepSchedule>> schedules = {
      {"sqrt", StepSchedule::power(1.0, 0.5, 1)},
      {"harmonic", StepSchedule::power(1.0, 1.0, 2)},
      {"quartic", StepSchedule::power(1.0, 4.0, 1)},
  };
  for (const auto& [label, sched] : schedules) {
    TrajectoryRecord rec = run(method, obj, sched, report.x0, opts);
    const double g = rec.final_point.size() == obj.dimension ? obj.grad(rec.final_point).norm() : std::nan("");
    report.runs.push_back({label, sched, std::move(rec), g});
  }

  const auto& sq = report.runs[0];
  const auto& hm = report.runs[1];
  const auto& qt = report.runs[2];
  for (const auto* r : {&sq, &hm}) {
    if (r->record.terminal != Terminal::escaped_region) {
      report.failures.push_back(r->label + " run did not escape (terminal " + to_string(r->record.terminal) + ")");
    }
  }
  if (sq.record.terminal == Terminal::escaped_region && hm.record.terminal == Terminal::escaped_region &&
      !(sq.record.k_final < hm.record.k_final)) {
    report.failures.push_back("sqrt run escaped at step " + std::to_string(sq.record.k_final) +
                              ", not before the harmonic run (step " + std::to_string(hm.record.k_final) + ")");
  }
  if (qt.record.terminal != Terminal::converged_to_point) {
    report.failures.push_back(std::string("quartic run did not converge (terminal ") + to_string(qt.record.terminal) +
                              ")");
  } else if (!(qt.final_grad_norm > 1e-3)) {
    report.failures.push_back("quartic run converged with gradient norm " + format_double(qt.final_grad_norm) +
                              " <= 1e-3");
  }
  return report;
}

ChartReport chart_experiment(const ExperimentConfig& cfg) {
  const Objective obj = build_objective(cfg.objective);
  const ChartConfig& cc = cfg.chart;
  Vector x_star = Vector::Zero(obj.dimension);
  for (std::size_t i = 0; i < cc.x_star.size(); ++i) x_star(static_cast<Eigen::Index>(i)) = cc.x_star[i];

  RemainderOptions ro;
  ro.method = cfg.method;
  if (cfg.metric) ro.metric = constant_metric(*cfg.metric);
  ro.delta = cc.delta;
  ro.horizon = cc.horizon;
  ro.tail_tol = cc.tail_tol;
  ro.lipschitz_pairs = cc.lipschitz_pairs;
  ro.seed = cfg.seed;

  ChartReport report{certify_radius(obj, x_star, cfg.schedule, ro, cc.max_halvings), std::nullopt, ""};
  const ContractionCertificate& cert = report.certified.certificate;
  const PerronProblem& prob = report.certified.linearized.problem;
  if (!cert.valid) {
    report.message = "contraction not certified: K = " + format_double(cert.K) + " >= 1 with epsilon = " +
                     format_double(cert.epsilon) + "; certification needs epsilon < epsilon* = " +
                     format_double(cert.epsilon_star);
    return report;
  }

  std::vector<Vector> grid;
  for (const Vector& g : uniform_grid_1d(cc.grid_lo, cc.grid_hi, cc.grid_points)) {
    Vector p = Vector::Zero(prob.split.stable_dim());
    p(0) = g(0);
    grid.push_back(p);
  }
  ChartOptions co;
  co.fixed_point.fp_tol = cc.fp_tol;
  co.fixed_point.fp_budget = cc.fp_budget;
  report.chart = chart(prob, cert, grid, co);
  report.message = "certified: K = " + format_double(cert.K);
  return report;
}

TrajectoryRecord single_run(const ExperimentConfig& cfg) {
  const Objective obj = build_objective(cfg.objective);
  const Method method = cfg.make_method();
  Vector x0(obj.dimension);
  for (Eigen::Index i = 0; i < obj.dimension; ++i) x0(i) = cfg.x0[static_cast<std::size_t>(i)];
  return run(method, obj, cfg.schedule, x0, cfg.run_options());
}

void emit_plot_data(const TrajectoryRecord& record, const std::filesystem::path& path, Eigen::Index dimension) {
  write_file(path, [&](std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> cols{"k"};
    for (auto& c : indexed_columns("x_", dimension)) cols.push_back(c);
    cols.emplace_back("step_size");
    cols.emplace_back("grad_norm");
    w.header(cols);
    for (const TrajectorySample& s : record.samples) {
      w.cell(static_cast<long long>(s.k));
      cells(w, s.x);
      w.cell(s.step_size).cell(s.grad_norm);
      w.end_row();
    }
  });
}

void emit_plot_data(const AvoidanceReport& report, const std::filesystem::path& path) {
  const Eigen::Index d = report.outcomes.empty() ? 0 : report.outcomes.front().x0.size();
  write_file(path, [&](std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> cols{"trial"};
    for (auto& c : indexed_columns("x0_", d)) cols.push_back(c);
    cols.emplace_back("terminal");
    cols.emplace_back("k_final");
    for (auto& c : indexed_columns("final_", d)) cols.push_back(c);
    cols.emplace_back("limit_class");
    cols.emplace_back("saddle_hit");
    cols.emplace_back("error");
    w.header(cols);
    for (const TrialOutcome& o : report.outcomes) {
      w.cell(static_cast<long long>(o.trial));
      if (o.x0.size() == d) {
        cells(w, o.x0);
      } else {
        for (Eigen::Index i = 0; i < d; ++i) w.cell(std::nan(""));
      }
      w.cell(std::string(to_string(o.terminal))).cell(static_cast<long long>(o.k_final));
      if (o.final_point.size() == d) {
        cells(w, o.final_point);
      } else {
        for (Eigen::Index i = 0; i < d; ++i) w.cell(std::nan(""));
      }
      w.cell(std::string(o.limit_tag ? to_string(*o.limit_tag) : ""));
      w.cell(static_cast<long long>(o.saddle_hit ? 1 : 0));
      w.cell(o.error);
      w.end_row();
    }
  });
}

void emit_plot_data(const ChartReport& report, const std::filesystem::path& path) {
  const auto& split = report.certified.linearized.problem.split;
  write_file(path, [&](std::ostream& os) {
    CsvWriter w(os);
    std::vector<std::string> cols;
    for (auto& c : indexed_columns("x0_plus_", split.stable_dim())) cols.push_back(c);
    for (auto& c : indexed_columns("x0_minus_", split.unstable_dim())) cols.push_back(c);
    for (const char* c : {"residual", "picard_iters", "ok", "error"}) cols.emplace_back(c);
    w.header(cols);
    if (!report.chart) return;
    for (const ChartSample& s : report.chart->samples) {
      cells(w, s.x0_plus);
      if (s.ok) {
        cells(w, s.x0_minus);
      } else {
        for (Eigen::Index i = 0; i < split.unstable_dim(); ++i) w.cell(std::nan(""));
      }
      w.cell(s.residual).cell(static_cast<long long>(s.picard_iterations)).cell(static_cast<long long>(s.ok ? 1 : 0));
      w.cell(s.error);
      w.end_row();
    }
  });
}

void write_certificate_summary(const ChartReport& report, const std::filesystem::path& path) {
  const ContractionCertificate& c = report.certified.certificate;
  const PerronProblem& p = report.certified.linearized.problem;
  nlohmann::ordered_json j;
  j["valid"] = c.valid;
  j["K1"] = c.K1;
  j["K2"] = c.K2;
  j["K"] = c.K;
  j["delta"] = p.delta;
  j["epsilon"] = c.epsilon;
  j["epsilon_source"] = report.certified.linearized.epsilon_source;
  j["epsilon_star"] = c.epsilon_star;
  j["N"] = p.horizon;
  j["alpha0"] = c.alpha0;
  j["lambda_stable"] = c.lambda_stable;
  j["lambda_unstable"] = c.lambda_unstable;
  j["halvings"] = report.certified.halvings;
  j["K2_tail"] = c.k2_detail.tail;
  j["K2_terms"] = c.k2_detail.terms;
  j["K2_tail_converged"] = c.k2_detail.tail_converged;
  j["truncation_bound"] = c.truncation_bound;
  j["schedule"] = p.schedule.id();
  if (report.chart) {
    const ManifoldChart& m = *report.chart;
    j["phi_at_zero_norm"] = m.phi_at_zero_norm;
    j["tangency_norm"] = m.tangency_norm;
    j["tangent"] = m.tangent;
    j["lipschitz_bound"] = m.lipschitz_bound;
    j["continuous"] = m.continuous;
    j["partial"] = m.partial;
    j["failed_samples"] = m.failed.size();
  }
  j["message"] = report.message;
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

int execute(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& dir = cfg.output_dir;
  switch (cfg.experiment) {
    case ExperimentKind::avoidance: {
      const AvoidanceReport r = avoidance_experiment(cfg);
      emit_plot_data(r, dir / "avoidance.csv");
      log << "trials: " << r.trials << '\n';
      for (Terminal t : {Terminal::escaped_region, Terminal::converged_to_point, Terminal::budget_exhausted,
                         Terminal::step_error}) {
        log << "  " << to_string(t) << ": " << r.count(t) << '\n';
      }
      for (CriticalTag t : {CriticalTag::strict_saddle, CriticalTag::local_min_candidate, CriticalTag::degenerate,
                            CriticalTag::not_critical}) {
        if (r.count(t) > 0) log << "    converged/" << to_string(t) << ": " << r.count(t) << '\n';
      }
      log << "saddle_hits: " << r.saddle_hits << '\n';
      int status = 0;
      if (cfg.expect.max_saddle_hits && r.saddle_hits > *cfg.expect.max_saddle_hits) {
        log << "FAIL: saddle_hits " << r.saddle_hits << " > expected max " << *cfg.expect.max_saddle_hits << '\n';
        status = 1;
      }
      if (cfg.expect.min_saddle_hits && r.saddle_hits < *cfg.expect.min_saddle_hits) {
        log << "FAIL: saddle_hits " << r.saddle_hits << " < expected min " << *cfg.expect.min_saddle_hits << '\n';
        status = 1;
      }
      return status;
    }
    case ExperimentKind::fig1: {
      const Fig1Report r = fig1_experiment(cfg);
      for (const Fig1Run& run : r.runs) {
        emit_plot_data(run.record, dir / ("fig1_" + run.label + ".csv"), 2);
      }
      write_file(dir / "fig1_summary.csv", [&](std::ostream& os) {
        CsvWriter w(os);
        w.header({"schedule", "schedule_id", "terminal", "k_final", "final_1", "final_2", "final_grad_norm"});
        for (const Fig1Run& run : r.runs) {
          w.cell(run.label).cell(run.schedule.id()).cell(std::string(to_string(run.record.terminal)));
          w.cell(static_cast<long long>(run.record.k_final));
          cells(w, run.record.final_point);
          w.cell(run.final_grad_norm);
          w.end_row();
        }
      });
      for (const Fig1Run& run : r.runs) {
        log << run.label << " (" << run.schedule.id() << "): " << to_string(run.record.terminal) << " at k = "
            << run.record.k_final << ", |grad f| = " << format_double(run.final_grad_norm) << '\n';
      }
      for (const auto& f : r.failures) log << "FAIL: " << f << '\n';
      return r.passed() ? 0 : 1;
    }
    case ExperimentKind::chart: {
      const ChartReport r = chart_experiment(cfg);
      write_certificate_summary(r, dir / "certificate.json");
      const ContractionCertificate& c = r.certified.certificate;
      log << "K1 = " << format_double(c.K1) << ", K2 = " << format_double(c.K2) << ", K = " << format_double(c.K)
          << ", delta = " << format_double(r.certified.linearized.problem.delta)
          << ", epsilon = " << format_double(c.epsilon) << ", N = " << r.certified.linearized.problem.horizon << '\n';
      if (!r.chart) {
        log << "FAIL: " << r.message << '\n';
        return 1;
      }
      emit_plot_data(r, dir / "chart.csv");
      log << "tangency |Dphi(0)| = " << format_double(r.chart->tangency_norm)
          << (r.chart->tangent ? " (tangent)" : " (NOT tangent)") << '\n';
      log << "continuity: " << (r.chart->continuous ? "ok" : "violated") << ", failed samples: " << r.chart->failed.size()
          << '\n';
      if (r.chart->partial || !r.chart->tangent || !r.chart->continuous) {
        log << "FAIL: chart checks did not pass\n";
        return 1;
      }
      return 0;
    }
    case ExperimentKind::single_run: {
      const TrajectoryRecord rec = single_run(cfg);
      emit_plot_data(rec, dir / "trajectory.csv", static_cast<Eigen::Index>(cfg.x0.size()));
      log << to_string(rec.terminal) << " at k = " << rec.k_final;
      if (rec.limit_class) log << " (" << to_string(rec.limit_class->tag) << ")";
      if (!rec.error.empty()) log << ": " << rec.error;
      log << '\n';
      return 0;
    }
  }
  return 0;
}

}  // namespace saddle
