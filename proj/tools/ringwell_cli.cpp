// Command-line front end: spectrum, sweep, dist, validate.
//
// Exit codes: 0 success, 1 validation failure, 2 usage error,
// 3 per-point failures present (with --strict).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ringwell/ringwell.hpp"

namespace {

using namespace ringwell;

struct ParamFlags {
  int M = 0, N = 0;
  std::optional<double> T, U, V0;
  std::optional<double> tau, v;
  double un_scale = 1.0;
};

void add_param_options(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--M", f.M, "lattice sites (>= 2)")->required();
  cmd->add_option("--N", f.N, "boson number (>= 1)")->required();
  auto* t = cmd->add_option("--T", f.T, "hopping amplitude");
  auto* u = cmd->add_option("--U", f.U, "attraction magnitude");
  auto* v0 = cmd->add_option("--V0", f.V0, "well depth at site 0");
  auto* tau = cmd->add_option("--tau", f.tau, "T/(U N); alternative to --T/--U/--V0");
  auto* vv = cmd->add_option("--v", f.v, "V0/(U N); alternative to --T/--U/--V0");
  auto* sc = cmd->add_option("--UN-scale", f.un_scale, "value of U*N used with --tau/--v");
  for (auto* a : {tau, vv, sc})
    for (auto* b : {t, u, v0}) a->excludes(b);
  cmd->set_config("--config", "", "plain key = value config file (flags take precedence)");
}

ModelParams resolve_params(const ParamFlags& f) {
  ModelParams p;
  p.M = f.M;
  p.N = f.N;
  if (f.tau || f.v) {
    if (!(f.un_scale > 0.0))
      throw CLI::ValidationError("--UN-scale must be > 0 with --tau/--v");
    p.U = f.un_scale / f.N;
    p.T = f.tau ? *f.tau * f.un_scale : 1.0;
    p.V0 = f.v ? *f.v * f.un_scale : 0.0;
  } else {
    p.T = f.T.value_or(1.0);
    p.U = f.U.value_or(0.0);
    p.V0 = f.V0.value_or(0.0);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  return p;
}

std::vector<Method> resolve_methods(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) {
      const auto m = parse_method(tok);
      if (!m) throw CLI::ValidationError("unknown method '" + tok + "'");
      out.push_back(*m);
    }
  if (out.empty()) throw CLI::ValidationError("no methods given");
  return out;
}

AxisSpec resolve_axis(const std::string& spec) {
  // name:min:max:steps
  AxisSpec a;
  std::stringstream ss(spec);
  std::string tok;
  std::vector<std::string> parts;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 4)
    throw CLI::ValidationError("axis spec must be name:min:max:steps, got '" + spec + "'");
  a.name = parts[0];
  try {
    a.min = std::stod(parts[1]);
    a.max = std::stod(parts[2]);
    a.steps = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw CLI::ValidationError("could not parse axis numbers in '" + spec + "'");
  }
  if (!valid_axis_name(a.name))
    throw CLI::ValidationError("axis name must be one of tau, v, T, U, V0");
  return a;
}

int emit(const Table& t, const std::string& out_path, const std::string& format, bool strict) {
  std::ostringstream body;
  if (format == "json")
    write_json(t, body);
  else
    write_csv(t, body);
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return 2;
    }
    os << body.str();
  }
  if (strict && table_has_failures(t)) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ringwell: spectra and ground-state distributions of attractive bosons\n"
               "on a ring lattice with a single-site potential well"};
  app.require_subcommand(1);

  std::string out_path, format = "csv";
  bool strict = false;
  auto add_output_options = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--strict", strict, "exit 3 when any point reports a failure status");
  };

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "lowest many-body levels of one method");
  ParamFlags spectrum_params;
  std::string spectrum_method = "exact";
  int spectrum_count = 5;
  add_param_options(spectrum, spectrum_params);
  spectrum->add_option("--method", spectrum_method, "exact|si|sf")
      ->check(CLI::IsMember({"exact", "si", "sf"}));
  spectrum->add_option("--count", spectrum_count, "number of levels")->check(CLI::PositiveNumber);
  add_output_options(spectrum);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "evaluate methods over a parameter grid");
  ParamFlags sweep_params;
  std::string axis1_spec, axis2_spec, sweep_methods = "exact", sweep_obs = "gs_energy";
  int sweep_count = 5, jobs = 1;
  add_param_options(sweep, sweep_params);
  sweep->add_option("--axis1", axis1_spec, "axis spec name:min:max:steps")->required();
  sweep->add_option("--axis2", axis2_spec, "optional second axis, same format");
  sweep->add_option("--methods", sweep_methods, "comma list of exact,si,sf");
  sweep->add_option("--observable", sweep_obs, "gs_energy|levels|sp_energies")
      ->check(CLI::IsMember({"gs_energy", "levels", "sp_energies"}));
  sweep->add_option("--count", sweep_count, "levels per point for observable=levels")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", jobs, "concurrent grid-point evaluations")
      ->check(CLI::PositiveNumber);
  add_output_options(sweep);

  // dist
  auto* dist = app.add_subcommand("dist", "ground-state site and momentum occupations");
  ParamFlags dist_params;
  std::string dist_methods = "exact";
  add_param_options(dist, dist_params);
  dist->add_option("--methods", dist_methods, "comma list of exact,si,sf");
  add_output_options(dist);

  // validate
  auto* validate = app.add_subcommand("validate", "run the internal oracle suite");
  validate->add_option("--out", out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (spectrum->parsed()) {
      const ModelParams p = resolve_params(spectrum_params);
      const Method m = *parse_method(spectrum_method);
      return emit(run_spectrum(p, m, spectrum_count), out_path, format, strict);
    }
    if (sweep->parsed()) {
      SweepGrid grid;
      grid.base = resolve_params(sweep_params);
      grid.axis1 = resolve_axis(axis1_spec);
      if (!axis2_spec.empty()) grid.axis2 = resolve_axis(axis2_spec);
      const auto methods = resolve_methods(sweep_methods);
      const Observable obs = *parse_observable(sweep_obs);
      validate_grid(grid);
      return emit(run_sweep(grid, methods, obs, sweep_count, jobs), out_path, format, strict);
    }
    if (dist->parsed()) {
      const ModelParams p = resolve_params(dist_params);
      return emit(run_dist(p, resolve_methods(dist_methods)), out_path, format, strict);
    }
    if (validate->parsed()) {
      const ValidationReport rep = run_validate();
      const std::string body = rep.to_json().dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << body;
      } else {
        std::ofstream os(out_path, std::ios::binary);
        os << body;
      }
      return rep.pass ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
