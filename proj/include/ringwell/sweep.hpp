#pragma once

#include <atomic>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ringwell/exact.hpp"
#include "ringwell/model.hpp"
#include "ringwell/sf.hpp"
#include "ringwell/si.hpp"
#include "ringwell/version.hpp"

namespace ringwell {

// ---------------------------------------------------------------------------
// Tabular output. Cells are typed so JSON keeps native numbers while CSV uses
// a fixed 17-significant-digit scientific format (round-trip exact, and
// byte-identical across runs and job counts).

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (const auto& c : t.comments) os << "# " << c << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << format_cell(row[i]) << (i + 1 < row.size() ? "," : "");
    os << "\n";
  }
}

inline void write_json(const Table& t, std::ostream& os) {
  nlohmann::json meta;
  meta["artifact"] = "ringwell";
  meta["version"] = kVersion;
  meta["comments"] = t.comments;
  meta["columns"] = t.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (std::holds_alternative<std::monostate>(c))
        obj[t.columns[i]] = nullptr;
      else if (const auto* d = std::get_if<double>(&c))
        obj[t.columns[i]] = *d;
      else if (const auto* n = std::get_if<long long>(&c))
        obj[t.columns[i]] = *n;
      else
        obj[t.columns[i]] = std::get<std::string>(c);
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::json out;
  out["meta"] = std::move(meta);
  out["rows"] = std::move(rows);
  os << out.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Methods, observables, per-point status.

enum class Method { exact, si, sf };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::si: return "si";
    default: return "sf";
  }
}

inline std::optional<Method> parse_method(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "si") return Method::si;
  if (s == "sf") return Method::sf;
  return std::nullopt;
}

enum class Observable { gs_energy, levels, sp_energies };

inline std::optional<Observable> parse_observable(const std::string& s) {
  if (s == "gs_energy") return Observable::gs_energy;
  if (s == "levels") return Observable::levels;
  if (s == "sp_energies") return Observable::sp_energies;
  return std::nullopt;
}

enum class PointStatus { ok, invalid_regime, singular, dimension_cap, no_convergence };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::invalid_regime: return "invalid_regime";
    case PointStatus::singular: return "singular";
    case PointStatus::dimension_cap: return "dimension_cap";
    default: return "no_convergence";
  }
}

// Map solver failures onto the per-point status vocabulary.
template <class Fn>
PointStatus guarded(Fn&& fn) {
  try {
    fn();
    return PointStatus::ok;
  } catch (const InvalidRegimeError&) {
    return PointStatus::invalid_regime;
  } catch (const DepletionError&) {
    return PointStatus::invalid_regime;
  } catch (const SingularError&) {
    return PointStatus::singular;
  } catch (const DimensionCapError&) {
    return PointStatus::dimension_cap;
  } catch (const NoBracketError&) {
    return PointStatus::no_convergence;
  } catch (const NoConvergenceError&) {
    return PointStatus::no_convergence;
  } catch (const BdgUnstableError&) {
    return PointStatus::invalid_regime;
  }
}

// ---------------------------------------------------------------------------
// Sweep grid.

struct AxisSpec {
  std::string name;  // one of tau, v, T, U, V0
  double min = 0.0, max = 0.0;
  int steps = 1;
};

struct SweepGrid {
  AxisSpec axis1;
  std::optional<AxisSpec> axis2;
  ModelParams base;
};

inline bool valid_axis_name(const std::string& n) {
  return n == "tau" || n == "v" || n == "T" || n == "U" || n == "V0";
}

inline double axis_value(const AxisSpec& a, int i) {
  if (a.steps <= 1) return a.min;
  return a.min + (a.max - a.min) * i / (a.steps - 1);
}

inline void apply_axis(ModelParams& p, const std::string& name, double value) {
  if (name == "T") {
    p.T = value;
  } else if (name == "U") {
    p.U = value;
  } else if (name == "V0") {
    p.V0 = value;
  } else if (name == "tau" || name == "v") {
    const double un = p.U * p.N;
    if (!(un > 0.0))
      throw std::invalid_argument("axis '" + name + "' requires U*N > 0 in the fixed params");
    if (name == "tau")
      p.T = value * un;
    else
      p.V0 = value * un;
  } else {
    throw std::invalid_argument("unknown axis name '" + name + "'");
  }
}

inline void validate_grid(const SweepGrid& grid) {
  auto check_axis = [](const AxisSpec& a) {
    if (!valid_axis_name(a.name))
      throw std::invalid_argument("invalid axis name '" + a.name + "'");
    if (a.steps < 1) throw std::invalid_argument("axis steps must be >= 1");
    if (!(a.min <= a.max)) throw std::invalid_argument("axis min must be <= max");
  };
  check_axis(grid.axis1);
  if (grid.axis2) {
    check_axis(*grid.axis2);
    if (grid.axis2->name == grid.axis1.name)
      throw std::invalid_argument("axis names must be distinct");
  }
  // every grid point must resolve to valid ModelParams
  const int n2 = grid.axis2 ? grid.axis2->steps : 1;
  for (int i = 0; i < grid.axis1.steps; ++i)
    for (int j = 0; j < n2; ++j) {
      ModelParams p = grid.base;
      apply_axis(p, grid.axis1.name, axis_value(grid.axis1, i));
      if (grid.axis2) apply_axis(p, grid.axis2->name, axis_value(*grid.axis2, j));
      p.validate();
    }
}

// ---------------------------------------------------------------------------
// Single-point evaluations.

namespace detail {

inline std::string occupation_label(const char* a, std::span<const int> va, const char* b,
                                    std::span<const int> vb) {
  std::string s = std::string(a) + "=[";
  for (std::size_t i = 0; i < va.size(); ++i) s += (i ? " " : "") + std::to_string(va[i]);
  s += "];";
  s += std::string(b) + "=[";
  for (std::size_t i = 0; i < vb.size(); ++i) s += (i ? " " : "") + std::to_string(vb[i]);
  s += "]";
  return s;
}

struct LevelRow {
  double energy;
  std::string label;
};

inline std::vector<LevelRow> levels_for(const ModelParams& p, Method method, int count,
                                        int* ground_cluster = nullptr) {
  std::vector<LevelRow> rows;
  switch (method) {
    case Method::exact: {
      FockBasis basis(p.M, p.N);
      const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), count);
      for (int i = 0; i < spec.energies.size(); ++i) rows.push_back({spec.energies(i), ""});
      if (ground_cluster) *ground_cluster = spec.ground_degeneracy;
      break;
    }
    case Method::si: {
      for (const SiLevel& l : si_levels(p, count))
        rows.push_back({l.energy, occupation_label("l", l.ell, "m", l.m)});
      break;
    }
    case Method::sf: {
      const SfSolution sol = solve_sf(p);
      for (const SfLevel& l : sf_levels(sol, count))
        rows.push_back({l.energy, occupation_label("p", l.p_occ, "q", l.q_occ)});
      break;
    }
  }
  return rows;
}

inline double gs_energy_for(const ModelParams& p, Method method) {
  switch (method) {
    case Method::exact: {
      FockBasis basis(p.M, p.N);
      return diagonalize(build_hamiltonian(p, basis), 1).energies(0);
    }
    case Method::si: {
      const SiSpectrum sp = si_sp_energies(p);
      return derive(p).C_N - p.N * sp.lambda[0];
    }
    default: {
      const SfSolution sol = solve_sf(p);
      const std::vector<int> zp(sol.f_sector.nu.size(), 0), zq(sol.theta.size(), 0);
      return sf_energy(sol, zp, zq);
    }
  }
}

// Single-particle observables: for `si` the secular ratios mu_q = lambda_q/2T
// plus the bare antisymmetric levels c_k; for `sf` the quasiparticle energies.
inline std::vector<std::pair<std::string, double>> sp_energies_for(const ModelParams& p,
                                                                   Method method) {
  std::vector<std::pair<std::string, double>> out;
  if (method == Method::si) {
    const SiSpectrum sp = si_sp_energies(p);
    for (std::size_t q = 0; q < sp.lambda.size(); ++q)
      out.emplace_back("mu_" + std::to_string(q), sp.lambda[q] / (2.0 * p.T));
    const ModeGrid grid = mode_grid(p);
    for (int k = 1; k <= grid.S; ++k) out.emplace_back("c_" + std::to_string(k), grid.c[k]);
  } else if (method == Method::sf) {
    const SfSolution sol = solve_sf(p);
    for (std::size_t k = 0; k < sol.f_sector.nu.size(); ++k)
      out.emplace_back("nu_" + std::to_string(k + 1), sol.f_sector.nu[k]);
    for (std::size_t l = 0; l < sol.F_sector.eta.size(); ++l)
      out.emplace_back("eta_" + std::to_string(l + 1), sol.F_sector.eta[l]);
  } else {
    throw std::invalid_argument("sp_energies is not defined for method 'exact'");
  }
  return out;
}

template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& w : workers) w.join();
}

inline std::string params_comment(const ModelParams& p) {
  return "params: M=" + std::to_string(p.M) + " N=" + std::to_string(p.N) +
         " T=" + format_double(p.T) + " U=" + format_double(p.U) +
         " V0=" + format_double(p.V0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// spectrum: the `count` lowest levels of one method, ground row marked,
// near-degenerate clusters labelled for the exact method.

inline Table run_spectrum(const ModelParams& p, Method method, int count) {
  p.validate();
  if (count < 1) throw std::invalid_argument("run_spectrum: count must be >= 1");
  Table t;
  t.comments = {"ringwell " + std::string(kVersion), "command: spectrum",
                detail::params_comment(p), "method: " + std::string(to_string(method))};
  t.columns = {"level", "method", "energy", "label", "ground", "cluster", "status"};
  std::vector<detail::LevelRow> rows;
  int ground_cluster = 1;
  const PointStatus status =
      guarded([&] { rows = detail::levels_for(p, method, count, &ground_cluster); });
  if (status != PointStatus::ok) {
    t.rows.push_back({Cell{0LL}, Cell{std::string(to_string(method))}, Cell{}, Cell{},
                      Cell{}, Cell{}, Cell{std::string(to_string(status))}});
    return t;
  }
  // cluster markers: consecutive levels closer than 1e-8 relative share a tag
  std::vector<long long> cluster(rows.size(), 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double tol = 1e-8 * std::max(1.0, std::abs(rows[0].energy));
    cluster[i] = (rows[i].energy - rows[i - 1].energy < tol) ? cluster[i - 1] : cluster[i - 1] + 1;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<Cell> r;
    r.push_back(Cell{static_cast<long long>(i)});
    r.push_back(Cell{std::string(to_string(method))});
    r.push_back(Cell{rows[i].energy});
    r.push_back(Cell{rows[i].label});
    r.push_back(Cell{static_cast<long long>(i == 0 ? 1 : 0)});
    if (method == Method::exact)
      r.push_back(Cell{cluster[i]});
    else
      r.push_back(Cell{});
    r.push_back(Cell{std::string("ok")});
    t.rows.push_back(std::move(r));
  }
  if (method == Method::exact)
    t.comments.push_back("ground_degeneracy: " + std::to_string(ground_cluster));
  return t;
}

// ---------------------------------------------------------------------------
// dist: site and momentum occupations of the ground state per method.

inline Table run_dist(const ModelParams& p, const std::vector<Method>& methods) {
  p.validate();
  if (methods.empty()) throw std::invalid_argument("run_dist: no methods");
  Table t;
  t.comments = {"ringwell " + std::string(kVersion), "command: dist",
                detail::params_comment(p)};
  t.columns = {"j"};
  for (Method m : methods) t.columns.push_back("n_" + std::string(to_string(m)));
  t.columns.push_back("k");
  for (Method m : methods) t.columns.push_back("m_" + std::string(to_string(m)));

  struct MethodDist {
    PointStatus status;
    std::vector<double> n, m;
  };
  std::vector<MethodDist> got;
  for (Method m : methods) {
    MethodDist md;
    md.status = guarded([&] {
      switch (m) {
        case Method::exact: {
          FockBasis basis(p.M, p.N);
          const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), 1);
          const Eigen::MatrixXd rho = one_body_density(spec.vectors.col(0), basis);
          const Eigen::VectorXd n = site_occupations(rho);
          const Eigen::VectorXd mk = momentum_occupations(rho);
          md.n.assign(n.data(), n.data() + n.size());
          md.m.assign(mk.data(), mk.data() + mk.size());
          break;
        }
        case Method::si: {
          const SiGroundState gs = si_ground_distributions(p);
          md.n = gs.n;
          md.m = gs.m;
          break;
        }
        case Method::sf: {
          const SfDistributions d = sf_ground_distributions(solve_sf(p));
          md.n = d.n;
          md.m = d.m;
          break;
        }
      }
    });
    if (md.status != PointStatus::ok)
      t.comments.push_back("method " + std::string(to_string(m)) +
                           " failed: " + to_string(md.status));
    got.push_back(std::move(md));
  }
  for (int i = 0; i < p.M; ++i) {
    std::vector<Cell> row;
    row.push_back(Cell{static_cast<long long>(i)});
    for (const auto& md : got)
      row.push_back(md.status == PointStatus::ok ? Cell{md.n[i]} : Cell{});
    row.push_back(Cell{static_cast<long long>(i)});
    for (const auto& md : got)
      row.push_back(md.status == PointStatus::ok ? Cell{md.m[i]} : Cell{});
    t.rows.push_back(std::move(row));
  }
  std::vector<Cell> sums;
  sums.push_back(Cell{std::string("sum")});
  for (const auto& md : got) {
    double s = 0.0;
    for (double x : md.n) s += x;
    sums.push_back(md.status == PointStatus::ok ? Cell{s} : Cell{});
  }
  sums.push_back(Cell{std::string("sum")});
  for (const auto& md : got) {
    double s = 0.0;
    for (double x : md.m) s += x;
    sums.push_back(md.status == PointStatus::ok ? Cell{s} : Cell{});
  }
  t.rows.push_back(std::move(sums));
  return t;
}

inline bool table_has_failures(const Table& t) {
  for (const auto& row : t.rows)
    for (const auto& c : row)
      if (const auto* s = std::get_if<std::string>(&c))
        if (*s != "ok" && (*s == "invalid_regime" || *s == "singular" ||
                           *s == "dimension_cap" || *s == "no_convergence"))
          return true;
  for (const auto& c : t.comments)
    if (c.find("failed:") != std::string::npos) return true;
  return false;
}

// ---------------------------------------------------------------------------
// sweep: one row per (grid point x method), grid order, optional second axis,
// relative errors against the exact method where available.

inline Table run_sweep(const SweepGrid& grid, const std::vector<Method>& methods,
                       Observable obs, int count, int jobs) {
  grid.base.validate();
  validate_grid(grid);
  if (methods.empty()) throw std::invalid_argument("run_sweep: no methods");
  if (obs == Observable::sp_energies) {
    if (methods.size() != 1)
      throw std::invalid_argument("sp_energies sweeps take exactly one method");
    if (methods[0] == Method::exact)
      throw std::invalid_argument("sp_energies is not defined for method 'exact'");
  }
  const bool has_exact =
      std::find(methods.begin(), methods.end(), Method::exact) != methods.end();
  const bool with_relerr = has_exact && methods.size() > 1 && obs != Observable::sp_energies;
  const int n1 = grid.axis1.steps;
  const int n2 = grid.axis2 ? grid.axis2->steps : 1;
  const int npoints = n1 * n2;
  const int nlev = obs == Observable::levels ? count : 1;

  // column layout
  Table t;
  t.comments = {"ringwell " + std::string(kVersion), "command: sweep",
                detail::params_comment(grid.base),
                "axis1: " + grid.axis1.name + " min=" + format_double(grid.axis1.min) +
                    " max=" + format_double(grid.axis1.max) +
                    " steps=" + std::to_string(grid.axis1.steps)};
  if (grid.axis2)
    t.comments.push_back("axis2: " + grid.axis2->name + " min=" + format_double(grid.axis2->min) +
                         " max=" + format_double(grid.axis2->max) +
                         " steps=" + std::to_string(grid.axis2->steps));
  {
    std::string ms = "methods:";
    for (Method m : methods) ms += std::string(" ") + to_string(m);
    t.comments.push_back(ms);
  }
  t.columns = {"idx", grid.axis1.name};
  if (grid.axis2) t.columns.push_back(grid.axis2->name);
  t.columns.push_back("method");
  t.columns.push_back("status");
  std::vector<std::string> value_cols;
  if (obs == Observable::gs_energy) {
    value_cols = {"E_gs"};
  } else if (obs == Observable::levels) {
    for (int i = 0; i < nlev; ++i) value_cols.push_back("E_" + std::to_string(i));
  } else {
    // fixed M: column names from a probe evaluation at the first grid point
    ModelParams probe = grid.base;
    apply_axis(probe, grid.axis1.name, axis_value(grid.axis1, 0));
    if (grid.axis2) apply_axis(probe, grid.axis2->name, axis_value(*grid.axis2, 0));
    const ModeGrid mg = mode_grid(probe);
    for (Method m : methods) {
      if (m == Method::si) {
        for (int q = 0; q <= mg.K; ++q) value_cols.push_back("mu_" + std::to_string(q));
        for (int k = 1; k <= mg.S; ++k) value_cols.push_back("c_" + std::to_string(k));
        break;  // same columns for every si row
      }
    }
    if (value_cols.empty()) {
      for (int k = 1; k <= mg.S; ++k) value_cols.push_back("nu_" + std::to_string(k));
      for (int l = 1; l <= mg.K; ++l) value_cols.push_back("eta_" + std::to_string(l));
    }
  }
  for (const auto& c : value_cols) t.columns.push_back(c);
  if (with_relerr)
    for (int i = 0; i < nlev; ++i)
      t.columns.push_back(nlev == 1 ? "relerr" : "relerr_" + std::to_string(i));

  struct MethodOutcome {
    PointStatus status = PointStatus::ok;
    std::vector<double> values;
  };
  struct PointResult {
    double a1 = 0.0, a2 = 0.0;
    std::vector<MethodOutcome> per_method;
  };
  std::vector<PointResult> results(npoints);

  detail::parallel_for(npoints, jobs, [&](int idx) {
    const int i1 = idx / n2, i2 = idx % n2;
    PointResult& pr = results[idx];
    pr.a1 = axis_value(grid.axis1, i1);
    if (grid.axis2) pr.a2 = axis_value(*grid.axis2, i2);
    ModelParams p = grid.base;
    apply_axis(p, grid.axis1.name, pr.a1);
    if (grid.axis2) apply_axis(p, grid.axis2->name, pr.a2);
    pr.per_method.resize(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      MethodOutcome& out = pr.per_method[mi];
      out.status = guarded([&] {
        switch (obs) {
          case Observable::gs_energy:
            out.values = {detail::gs_energy_for(p, methods[mi])};
            break;
          case Observable::levels: {
            auto rows = detail::levels_for(p, methods[mi], nlev);
            for (const auto& r : rows) out.values.push_back(r.energy);
            break;
          }
          case Observable::sp_energies: {
            for (const auto& [name, val] : detail::sp_energies_for(p, methods[mi]))
              out.values.push_back(val);
            break;
          }
        }
      });
    }
  });

  // assembly in grid order
  for (int idx = 0; idx < npoints; ++idx) {
    const PointResult& pr = results[idx];
    const MethodOutcome* exact = nullptr;
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
      if (methods[mi] == Method::exact) exact = &pr.per_method[mi];
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const MethodOutcome& out = pr.per_method[mi];
      std::vector<Cell> row;
      row.push_back(Cell{static_cast<long long>(idx)});
      row.push_back(Cell{pr.a1});
      if (grid.axis2) row.push_back(Cell{pr.a2});
      row.push_back(Cell{std::string(to_string(methods[mi]))});
      row.push_back(Cell{std::string(to_string(out.status))});
      for (std::size_t vi = 0; vi < value_cols.size(); ++vi)
        row.push_back(out.status == PointStatus::ok && vi < out.values.size()
                          ? Cell{out.values[vi]}
                          : Cell{});
      if (with_relerr) {
        for (int i = 0; i < nlev; ++i) {
          if (methods[mi] != Method::exact && exact && exact->status == PointStatus::ok &&
              out.status == PointStatus::ok && i < static_cast<int>(out.values.size()) &&
              i < static_cast<int>(exact->values.size()) && exact->values[i] != 0.0)
            row.push_back(Cell{std::abs(out.values[i] - exact->values[i]) /
                               std::abs(exact->values[i])});
          else
            row.push_back(Cell{});
        }
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

}  // namespace ringwell
