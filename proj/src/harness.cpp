// SPDX-License-Identifier: Apache-2.0

#include "fdpa/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdpa/units.hpp"
#include "fdpa/zf.hpp"

namespace fdpa {

const char* const kCodeVersion = "fdpa 1.0.0";

std::vector<std::string> ExperimentSpec::check() const {
  std::vector<std::string> errors = validate(system);
  for (const std::string& e : validate(sweep)) errors.push_back(e);
  if (mode == Mode::sinr_sweep) {
    if (lambda(0) < 0 || lambda(1) < 0 ||
        std::abs(lambda(0) + lambda(1) - 1.0) > 1e-12)
      errors.push_back("lambda: sinr_sweep mode requires a valid weight pair");
    if (sweep.sinr_dl_sweep.empty())
      errors.push_back("sinr_dl_sweep: must be non-empty in sinr_sweep mode");
  }
  return errors;
}

AggregateRow aggregate_cell(const std::string& status, double group_key,
                            double lambda1, double lambda2,
                            const std::vector<DropPoint>& drops) {
  AggregateRow row;
  row.status = status;
  row.group_key = group_key;
  row.lambda1 = lambda1;
  row.lambda2 = lambda2;
  row.total_drops = static_cast<int>(drops.size());
  double dl = 0.0, ul = 0.0;
  for (const DropPoint& d : drops) {
    if (!d.feasible) continue;
    ++row.feasible_drops;
    dl += d.dl_w;
    ul += d.ul_w;
  }
  if (row.feasible_drops > 0) {
    row.mean_dl_w = dl / row.feasible_drops;
    row.mean_ul_w = ul / row.feasible_drops;
  }
  return row;
}

namespace {

enum class DropClass { certified, infeasible, failed };

struct FrontierDrop {
  Frontier fr;
  HdPoint hd;
  DropClass cls = DropClass::failed;
  std::string note;
};

struct SinrDrop {
  ParetoPoint fd;
  HdPoint hd;
  DropClass cls = DropClass::failed;
  std::string note;
};

int resolve_jobs(RunBackend backend, int jobs) {
  if (backend == RunBackend::serial) return 1;
#ifdef _OPENMP
  return jobs > 0 ? jobs : omp_get_max_threads();
#else
  (void)jobs;
  return 1;
#endif
}

DropClass classify_frontier(const Frontier& fr) {
  if (!fr.feasible) {
    const bool infeasible = fr.note.find("primal_infeasible") != std::string::npos;
    return infeasible ? DropClass::infeasible : DropClass::failed;
  }
  for (const ParetoPoint& pt : fr.points) {
    if (pt.status == SolveStatus::primal_infeasible) return DropClass::infeasible;
    if (!pt.certificate_ok) return DropClass::failed;
  }
  return DropClass::certified;
}

void write_na_or_dbm(std::ostream& os, bool ok, double watts) {
  if (ok)
    os << watts_to_dbm(watts);
  else
    os << "NA";
}

std::string make_manifest(const ExperimentSpec& spec, const char* mode_name) {
  std::ostringstream os;
  os.precision(17);
  os << "code_version = " << kCodeVersion << "\n"
     << "mode = " << mode_name << "\n";
  if (spec.mode == ExperimentSpec::Mode::sinr_sweep)
    os << "lambda1 = " << spec.lambda(0) << "\n"
       << "lambda2 = " << spec.lambda(1) << "\n";
  os << dump_config(spec.system, spec.sweep);
  return os.str();
}

void append_aggregate_csv(std::ostream& os, const AggregateRow& row,
                          const char* group_name) {
  (void)group_name;
  os << row.group_key << ",";
  if (std::isnan(row.lambda1))
    os << "NA,NA,";
  else
    os << row.lambda1 << "," << row.lambda2 << ",";
  if (row.has_mean())
    os << watts_to_dbm(row.mean_dl_w) << "," << watts_to_dbm(row.mean_ul_w);
  else
    os << "NA,NA";
  os << "," << row.feasible_drops << "," << row.total_drops << "," << row.status
     << "\n";
}

}  // namespace

RunResult run_frontier(const ExperimentSpec& spec, RunBackend backend, int jobs) {
  const auto errors = spec.check();
  if (!errors.empty())
    throw std::invalid_argument("invalid experiment spec: " + errors.front());

  const int num_groups = static_cast<int>(spec.sweep.nt_list.size());
  const int drops = spec.sweep.num_drops;
  const int total = num_groups * drops;
  std::vector<FrontierDrop> records(static_cast<std::size_t>(total));
  const int nthreads = resolve_jobs(backend, jobs);

#pragma omp parallel for schedule(dynamic) num_threads(nthreads) \
    if (backend == RunBackend::openmp)
  for (int idx = 0; idx < total; ++idx) {
    const int gi = idx / drops;
    const int drop = idx % drops;
    FrontierDrop& rec = records[static_cast<std::size_t>(idx)];
    try {
      SystemConfig cfg = spec.system;
      cfg.num_antennas = spec.sweep.nt_list[static_cast<std::size_t>(gi)];
      const ChannelRealization ch = draw_realization(
          cfg, spec.sweep.master_seed, static_cast<std::uint64_t>(drop));
      const ReceiveBank bank = build_zf(ch.g);
      const Targets targets = Targets::from_config(cfg);
      rec.fr = sweep(ch, bank, targets, spec.sweep.lambda_step, spec.solver,
                     /*parallel=*/false);
      rec.hd = hd_point(ch, targets, spec.solver, &rec.fr.cert);
      rec.cls = classify_frontier(rec.fr);
    } catch (const std::exception& e) {
      rec.cls = DropClass::failed;
      rec.note = e.what();
    }
  }

  RunResult run;
  run.total_drop_runs = total;
  const int lambda_points =
      static_cast<int>(std::llround(1.0 / spec.sweep.lambda_step)) + 1;

  std::ostringstream points;
  points.precision(12);
  points << "nt,drop,lambda1,lambda2,dl_power_dbm,ul_power_dbm,status\n";
  for (int gi = 0; gi < num_groups; ++gi) {
    for (int drop = 0; drop < drops; ++drop) {
      const FrontierDrop& rec =
          records[static_cast<std::size_t>(gi * drops + drop)];
      const int nt = spec.sweep.nt_list[static_cast<std::size_t>(gi)];
      if (rec.fr.feasible) {
        for (const ParetoPoint& pt : rec.fr.points) {
          points << nt << "," << drop << "," << pt.lambda(0) << ","
                 << pt.lambda(1) << ",";
          write_na_or_dbm(points, pt.status == SolveStatus::optimal, pt.dl_power);
          points << ",";
          write_na_or_dbm(points, pt.status == SolveStatus::optimal, pt.ul_power);
          points << "," << pareto_status_name(pt) << "\n";
        }
      } else {
        points << nt << "," << drop << ",NA,NA,NA,NA,anchors_failed\n";
      }
      points << nt << "," << drop << ",NA,NA,";
      write_na_or_dbm(points, rec.hd.feasible, rec.hd.dl_power);
      points << ",";
      write_na_or_dbm(points, rec.hd.feasible, rec.hd.ul_power);
      points << "," << (rec.hd.feasible ? "HD" : "HD_infeasible") << "\n";
    }
  }
  run.per_point_csv = points.str();

  for (int gi = 0; gi < num_groups; ++gi) {
    const int nt = spec.sweep.nt_list[static_cast<std::size_t>(gi)];
    for (int li = 0; li < lambda_points; ++li) {
      std::vector<DropPoint> cell(static_cast<std::size_t>(drops));
      const double l1 =
          (li == lambda_points - 1) ? 1.0 : li * spec.sweep.lambda_step;
      for (int drop = 0; drop < drops; ++drop) {
        const FrontierDrop& rec =
            records[static_cast<std::size_t>(gi * drops + drop)];
        DropPoint& d = cell[static_cast<std::size_t>(drop)];
        if (rec.cls != DropClass::certified) continue;
        const ParetoPoint& pt = rec.fr.points[static_cast<std::size_t>(li)];
        d.feasible = true;
        d.dl_w = pt.dl_power;
        d.ul_w = pt.ul_power;
      }
      run.aggregate.push_back(aggregate_cell("FD", nt, l1, 1.0 - l1, cell));
    }
    std::vector<DropPoint> hd_cell(static_cast<std::size_t>(drops));
    for (int drop = 0; drop < drops; ++drop) {
      const FrontierDrop& rec =
          records[static_cast<std::size_t>(gi * drops + drop)];
      DropPoint& d = hd_cell[static_cast<std::size_t>(drop)];
      if (!rec.hd.feasible) continue;
      d.feasible = true;
      d.dl_w = rec.hd.dl_power;
      d.ul_w = rec.hd.ul_power;
    }
    run.aggregate.push_back(aggregate_cell(
        "HD", nt, std::numeric_limits<double>::quiet_NaN(),
        std::numeric_limits<double>::quiet_NaN(), hd_cell));
  }

  for (const FrontierDrop& rec : records) {
    run.cert.merge(rec.fr.cert);
    if (rec.cls == DropClass::infeasible) ++run.infeasible_drops;
    if (rec.cls == DropClass::failed) ++run.failed_drops;
  }

  std::ostringstream agg;
  agg.precision(12);
  agg << "nt,lambda1,lambda2,mean_dl_power_dbm,mean_ul_power_dbm,"
         "feasible_drops,total_drops,status\n";
  for (const AggregateRow& row : run.aggregate)
    append_aggregate_csv(agg, row, "nt");
  run.aggregate_csv = agg.str();
  run.manifest = make_manifest(spec, "frontier");
  return run;
}

RunResult run_sinr_sweep(const ExperimentSpec& spec, RunBackend backend,
                         int jobs) {
  const auto errors = spec.check();
  if (!errors.empty())
    throw std::invalid_argument("invalid experiment spec: " + errors.front());

  const int num_groups = static_cast<int>(spec.sweep.sinr_dl_sweep.size());
  const int drops = spec.sweep.num_drops;
  const int total = num_groups * drops;
  std::vector<SinrDrop> records(static_cast<std::size_t>(total));
  std::vector<CertificateStats> stats(static_cast<std::size_t>(total));
  const int nthreads = resolve_jobs(backend, jobs);

#pragma omp parallel for schedule(dynamic) num_threads(nthreads) \
    if (backend == RunBackend::openmp)
  for (int idx = 0; idx < total; ++idx) {
    const int gi = idx / drops;
    const int drop = idx % drops;
    SinrDrop& rec = records[static_cast<std::size_t>(idx)];
    CertificateStats& st = stats[static_cast<std::size_t>(idx)];
    try {
      SystemConfig cfg = spec.system;
      cfg.sinr_target_dl = {spec.sweep.sinr_dl_sweep[static_cast<std::size_t>(gi)]};
      const ChannelRealization ch = draw_realization(
          cfg, spec.sweep.master_seed, static_cast<std::uint64_t>(drop));
      const ReceiveBank bank = build_zf(ch.g);
      const Targets targets = Targets::from_config(cfg);
      const Anchors a = compute_anchors(ch, bank, targets, spec.solver);
      if (!a.ok()) {
        rec.cls = (a.status_p1 == SolveStatus::primal_infeasible ||
                   a.status_p2 == SolveStatus::primal_infeasible)
                      ? DropClass::infeasible
                      : DropClass::failed;
        rec.note = a.failure();
      } else {
        rec.fd = solve_tcheby_point(ch, bank, targets, spec.lambda,
                                    Eigen::Vector2d(a.q1, a.q2), spec.solver, &st);
        rec.cls = rec.fd.certificate_ok
                      ? DropClass::certified
                      : (rec.fd.status == SolveStatus::primal_infeasible
                             ? DropClass::infeasible
                             : DropClass::failed);
      }
      rec.hd = hd_point(ch, targets, spec.solver, &st);
    } catch (const std::exception& e) {
      rec.cls = DropClass::failed;
      rec.note = e.what();
    }
  }

  RunResult run;
  run.total_drop_runs = total;

  std::ostringstream points;
  points.precision(12);
  points << "sinr_dl_db,drop,lambda1,lambda2,dl_power_dbm,ul_power_dbm,status\n";
  for (int gi = 0; gi < num_groups; ++gi) {
    const double gdb = spec.sweep.sinr_dl_sweep[static_cast<std::size_t>(gi)];
    for (int drop = 0; drop < drops; ++drop) {
      const SinrDrop& rec = records[static_cast<std::size_t>(gi * drops + drop)];
      points << gdb << "," << drop << "," << spec.lambda(0) << ","
             << spec.lambda(1) << ",";
      const bool ok = rec.cls == DropClass::certified;
      write_na_or_dbm(points, ok, rec.fd.dl_power);
      points << ",";
      write_na_or_dbm(points, ok, rec.fd.ul_power);
      points << ","
             << (ok ? "optimal"
                    : (rec.cls == DropClass::infeasible ? "infeasible" : "failed"))
             << "\n";
      points << gdb << "," << drop << ",NA,NA,";
      write_na_or_dbm(points, rec.hd.feasible, rec.hd.dl_power);
      points << ",";
      write_na_or_dbm(points, rec.hd.feasible, rec.hd.ul_power);
      points << "," << (rec.hd.feasible ? "HD" : "HD_infeasible") << "\n";
    }
  }
  run.per_point_csv = points.str();

  for (int gi = 0; gi < num_groups; ++gi) {
    const double gdb = spec.sweep.sinr_dl_sweep[static_cast<std::size_t>(gi)];
    std::vector<DropPoint> fd_cell(static_cast<std::size_t>(drops));
    std::vector<DropPoint> hd_cell(static_cast<std::size_t>(drops));
    for (int drop = 0; drop < drops; ++drop) {
      const SinrDrop& rec = records[static_cast<std::size_t>(gi * drops + drop)];
      if (rec.cls == DropClass::certified) {
        fd_cell[static_cast<std::size_t>(drop)] = {rec.fd.dl_power,
                                                   rec.fd.ul_power, true};
      }
      if (rec.hd.feasible)
        hd_cell[static_cast<std::size_t>(drop)] = {rec.hd.dl_power,
                                                   rec.hd.ul_power, true};
    }
    run.aggregate.push_back(
        aggregate_cell("FD", gdb, spec.lambda(0), spec.lambda(1), fd_cell));
    run.aggregate.push_back(aggregate_cell(
        "HD", gdb, std::numeric_limits<double>::quiet_NaN(),
        std::numeric_limits<double>::quiet_NaN(), hd_cell));
  }

  for (int idx = 0; idx < total; ++idx) {
    run.cert.merge(stats[static_cast<std::size_t>(idx)]);
    if (records[static_cast<std::size_t>(idx)].cls == DropClass::infeasible)
      ++run.infeasible_drops;
    if (records[static_cast<std::size_t>(idx)].cls == DropClass::failed)
      ++run.failed_drops;
  }

  std::ostringstream agg;
  agg.precision(12);
  agg << "sinr_dl_db,lambda1,lambda2,mean_dl_power_dbm,mean_ul_power_dbm,"
         "feasible_drops,total_drops,status\n";
  for (const AggregateRow& row : run.aggregate)
    append_aggregate_csv(agg, row, "sinr_dl_db");
  run.aggregate_csv = agg.str();
  run.manifest = make_manifest(spec, "sinr_sweep");
  return run;
}

RunResult run_experiment(const ExperimentSpec& spec, RunBackend backend,
                         int jobs) {
  return spec.mode == ExperimentSpec::Mode::frontier
             ? run_frontier(spec, backend, jobs)
             : run_sinr_sweep(spec, backend, jobs);
}

void write_run_artifacts(const RunResult& run, const std::string& dir,
                         const std::string& prefix) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream os(dir + "/" + prefix + name);
    if (!os) throw std::runtime_error("cannot write " + dir + "/" + prefix + name);
    os << content;
  };
  write("_points.csv", run.per_point_csv);
  write("_aggregate.csv", run.aggregate_csv);
  write("_manifest.txt", run.manifest);
}

}  // namespace fdpa
