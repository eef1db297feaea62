// esstool: constellation-shaping toolkit front end.
//
// Subcommands: trellis-info, shape, deshape, rate-loss-sweep, wachsmann,
// complexity, simulate. Exit codes: 0 success, 1 usage, 2 runtime.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ess/analysis.hpp"
#include "ess/codecs.hpp"
#include "ess/errors.hpp"
#include "ess/io.hpp"
#include "ess/pas.hpp"
#include "ess/trellis.hpp"

using nlohmann::json;

namespace {

struct TrellisOptions {
  int m = 3;
  int n = 4;
  long long emax = 28;
  std::string precision = "full";
  int mantissa_bits = 12;
  int exponent_bits = 8;
  std::string params_file;

  ess::Precision make_precision() const {
    if (precision == "bounded")
      return ess::Precision::bounded(mantissa_bits, exponent_bits);
    if (precision != "full")
      throw ess::ConfigError({"precision must be 'full' or 'bounded'"});
    return ess::Precision::full();
  }

  ess::TrellisParams resolve() const {
    if (!params_file.empty()) {
      std::ifstream in(params_file);
      if (!in) throw std::runtime_error("cannot open " + params_file);
      auto cfg = ess::KeyValueConfig::parse(in);
      auto p = ess::TrellisParams::from_config(cfg);
      cfg.finish();
      return p;
    }
    return ess::TrellisParams{m, n, emax, make_precision()};
  }
};

void add_trellis_options(CLI::App* cmd, TrellisOptions& opt, bool with_params) {
  cmd->add_option("-m,--bits-per-symbol", opt.m, "ASK bit levels m (alphabet 1..2^m-1)");
  cmd->add_option("-n,--block-length", opt.n, "amplitudes per shaping block");
  cmd->add_option("-e,--emax", opt.emax, "maximum sequence energy");
  cmd->add_option("--precision", opt.precision, "full | bounded")
      ->check(CLI::IsMember({"full", "bounded"}));
  cmd->add_option("--mantissa-bits", opt.mantissa_bits, "bounded-mode mantissa width");
  cmd->add_option("--exponent-bits", opt.exponent_bits, "bounded-mode exponent width");
  if (with_params)
    cmd->add_option("--params", opt.params_file,
                    "key=value file with m/n/emax/precision");
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  return file;
}

void run_trellis_info(const TrellisOptions& opt, bool trim, bool as_json,
                      const std::string& dump_path) {
  const auto params = opt.resolve();
  const ess::AmplitudeAlphabet alphabet(params.m);
  auto trellis = ess::EnergyTrellis::build(alphabet, params.block_length,
                                           params.max_energy, params.precision);
  if (trim) trellis = trellis.trim_top_level();

  const auto summary = ess::summarize(trellis);
  const auto pmf = trellis.amplitude_distribution();
  const auto ess_cost = ess::complexity_bounds(
      ess::ShapingMethod::ess, params.block_length, summary.shaping_rate,
      trellis.levels(), alphabet.size(), params.precision);

  if (!dump_path.empty()) {
    std::ofstream dump(dump_path);
    if (!dump) throw std::runtime_error("cannot open " + dump_path);
    trellis.dump(dump);
  }

  if (as_json) {
    json j;
    j["m"] = params.m;
    j["block_length"] = params.block_length;
    j["max_energy"] = params.max_energy;
    j["precision"] = params.precision.is_bounded() ? "bounded" : "full";
    if (params.precision.is_bounded()) {
      j["mantissa_bits"] = params.precision.mantissa_bits;
      j["exponent_bits"] = params.precision.exponent_bits;
    }
    j["trimmed"] = trim;
    j["sequence_count"] = trellis.sequence_count().str();
    j["input_bits"] = summary.input_bits;
    j["shaping_rate"] = summary.shaping_rate;
    j["operational_rate"] = summary.operational_rate;
    j["average_energy"] = summary.average_energy;
    j["shaping_gain_db"] = summary.shaping_gain_db;
    j["amplitude_pmf"] = pmf;
    j["levels"] = trellis.levels();
    j["storage_bits"] = ess_cost.storage_bits;
    j["bit_ops_per_dim"] = ess_cost.bit_ops_per_dim;
    std::cout << j.dump(2) << '\n';
    return;
  }

  std::cout << "sequences        " << trellis.sequence_count() << '\n';
  std::cout << "input_bits       " << summary.input_bits << '\n';
  std::cout << "shaping_rate     " << ess::format_sig(summary.shaping_rate)
            << " bit/amp\n";
  std::cout << "operational_rate " << ess::format_sig(summary.operational_rate)
            << " bit/amp\n";
  std::cout << "average_energy   " << ess::format_sig(summary.average_energy) << '\n';
  std::cout << "shaping_gain_db  " << ess::format_sig(summary.shaping_gain_db) << '\n';
  std::cout << "amplitude_pmf   ";
  for (double p : pmf) std::cout << ' ' << ess::format_sig(p);
  std::cout << '\n';
  std::cout << "levels           " << trellis.levels() << '\n';
  std::cout << "storage_bits     " << ess_cost.storage_bits << " ("
            << ess::format_sig(ess_cost.storage_bits / 8000.0) << " kB)\n";
  std::cout << "bit_ops_per_dim  " << ess::format_sig(ess_cost.bit_ops_per_dim)
            << '\n';
}

void run_shape(const TrellisOptions& opt, const std::string& in_path,
               const std::string& out_path, bool deshape) {
  const auto params = opt.resolve();
  const ess::AmplitudeAlphabet alphabet(params.m);
  const auto trellis = ess::EnergyTrellis::build(alphabet, params.block_length,
                                                 params.max_energy, params.precision);
  const int k = ess::input_length(trellis.sequence_count());

  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::ofstream out_file;
  std::ostream& out = open_output(out_file, out_path);

  if (!deshape) {
    const auto blocks = ess::read_hex_blocks(in, k);
    std::vector<std::vector<int>> sequences;
    sequences.reserve(blocks.size());
    for (const auto& index : blocks)
      sequences.push_back(ess::ess_encode(trellis, index));
    ess::write_amplitude_lines(out, sequences);
    return;
  }

  const auto sequences = ess::read_amplitude_lines(in);
  std::vector<ess::BigInt> blocks;
  blocks.reserve(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    try {
      auto index = ess::ess_decode(trellis, sequences[i]);
      if (ess::bit_length(index) > static_cast<std::size_t>(k))
        throw ess::InvalidSequenceError("index outside the 2^k operational codebook");
      blocks.push_back(std::move(index));
    } catch (const std::exception& e) {
      throw ess::InvalidSequenceError("line " + std::to_string(i + 1) + ": " +
                                      e.what());
    }
  }
  ess::write_hex_blocks(out, blocks, k);
}

void run_rate_loss_sweep(int m, double rate, std::vector<int> n_list,
                         const std::string& out_path) {
  const ess::AmplitudeAlphabet alphabet(m);
  std::ofstream out_file;
  std::ostream& out = open_output(out_file, out_path);
  out << "n,rate_loss_sphere,rate_loss_shell,rate_loss_cc\n";
  for (int n : n_list) {
    const auto point = ess::rate_loss_point(alphabet, n, rate);
    if (!point.sphere && !point.shell && !point.cc) {
      std::cerr << "note: n=" << n << " infeasible at rate " << rate
                << ", row skipped\n";
      continue;
    }
    auto cell = [](const std::optional<double>& v) {
      return v ? ess::format_sig(*v) : std::string();
    };
    out << n << ',' << cell(point.sphere) << ',' << cell(point.shell) << ','
        << cell(point.cc) << '\n';
    if (!point.shell || !point.cc)
      std::cerr << "note: n=" << n << " infeasible for "
                << (!point.shell ? "single-shell" : "") << (!point.shell && !point.cc ? " and " : "")
                << (!point.cc ? "constant-composition" : "") << " codes\n";
  }
}

void run_wachsmann(int m, double rate, double hx_min, double hx_max, double hx_step,
                   const std::string& out_path) {
  std::vector<double> grid;
  for (double hx = hx_min; hx <= hx_max + 1e-12; hx += hx_step) grid.push_back(hx);
  const auto points = ess::wachsmann_sweep(m, rate, grid);
  std::ofstream out_file;
  std::ostream& out = open_output(out_file, out_path);
  out << "hx,delta_snr_db,code_rate,gamma\n";
  for (const auto& p : points) {
    out << ess::format_sig(p.hx) << ',' << ess::format_sig(p.delta_snr_db) << ','
        << ess::format_sig(p.code_rate) << ',' << ess::format_sig(p.gamma) << '\n';
    if (p.unbounded)
      std::cerr << "note: hx=" << p.hx << " gap unbounded, capped at 40 dB\n";
  }
}

void run_complexity(const std::string& method_name, const TrellisOptions& opt,
                    double rs_override, bool as_json) {
  const auto params = opt.resolve();
  const ess::AmplitudeAlphabet alphabet(params.m);
  const auto trellis = ess::EnergyTrellis::build(alphabet, params.block_length,
                                                 params.max_energy, params.precision);
  const double rs = rs_override > 0.0
                        ? rs_override
                        : ess::log2_big(trellis.sequence_count()) / params.block_length;

  ess::ShapingMethod method;
  if (method_name == "ess")
    method = ess::ShapingMethod::ess;
  else if (method_name == "laroia1")
    method = ess::ShapingMethod::laroia1;
  else
    method = ess::ShapingMethod::shell_mapping;

  const auto bounds =
      ess::complexity_bounds(method, params.block_length, rs, trellis.levels(),
                             alphabet.size(), params.precision);
  if (as_json) {
    json j;
    j["method"] = method_name;
    j["block_length"] = params.block_length;
    j["max_energy"] = params.max_energy;
    j["shaping_rate"] = rs;
    j["levels"] = trellis.levels();
    j["bit_ops_per_dim"] = bounds.bit_ops_per_dim;
    j["storage_bits"] = bounds.storage_bits;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "method           " << method_name << '\n';
  std::cout << "shaping_rate     " << ess::format_sig(rs) << " bit/amp\n";
  std::cout << "levels           " << trellis.levels() << '\n';
  std::cout << "bit_ops_per_dim  " << ess::format_sig(bounds.bit_ops_per_dim) << '\n';
  std::cout << "storage_bits     " << bounds.storage_bits << " ("
            << ess::format_sig(bounds.storage_bits / 8000.0) << " kB)\n";
}

void run_simulate(const std::string& config_path, const std::string& out_path,
                  const std::string& meta_path, int threads_override) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  auto spec = ess::parse_simulation_spec(in);
  if (threads_override > 0) spec.pas.threads = threads_override;

  const ess::PASSystem system(spec.pas);
  const auto points = ess::fer_sim(spec.pas, spec.fer, &std::cerr);

  std::ofstream out_file;
  std::ostream& out = open_output(out_file, out_path);
  out << "snr_db,frames,frame_errors,fer,ci_low,ci_high\n";
  for (const auto& p : points)
    out << ess::format_sig(p.snr_db) << ',' << p.frames << ',' << p.frame_errors
        << ',' << ess::format_sig(p.fer) << ',' << ess::format_sig(p.ci_low) << ','
        << ess::format_sig(p.ci_high) << '\n';

  json meta;
  meta["tool"] = "esstool";
  meta["version"] = ess::kVersion;
  meta["seed"] = spec.pas.seed;
  meta["config"]["scheme"] = spec.pas.scheme;
  meta["config"]["m"] = spec.pas.m;
  meta["config"]["n"] = spec.pas.shaping_length;
  meta["config"]["emax"] = spec.pas.max_energy;
  meta["config"]["blocks_per_frame"] = spec.pas.blocks_per_frame;
  meta["config"]["code_rate"] = std::to_string(spec.pas.code_rate_num) + "/" +
                                std::to_string(spec.pas.code_rate_den);
  meta["config"]["termination"] = spec.pas.termination;
  meta["config"]["precision"] =
      spec.pas.precision.is_bounded() ? "bounded" : "full";
  if (spec.pas.precision.is_bounded()) {
    meta["config"]["mantissa_bits"] = spec.pas.precision.mantissa_bits;
    meta["config"]["exponent_bits"] = spec.pas.precision.exponent_bits;
  }
  meta["config"]["snr_db"] = spec.fer.snr_db;
  meta["config"]["max_frames"] = spec.fer.max_frames;
  meta["config"]["target_errors"] = spec.fer.target_errors;
  meta["derived"]["gamma"] = spec.pas.gamma();
  meta["derived"]["symbols_per_frame"] = system.symbols_per_frame();
  meta["derived"]["data_bits_per_frame"] = system.data_bits_per_frame();
  meta["derived"]["expected_symbol_energy"] = system.expected_symbol_energy();
  if (spec.pas.scheme == "ess") {
    meta["derived"]["input_bits"] = system.input_bits();
    meta["derived"]["transmission_rate"] =
        static_cast<double>(system.input_bits()) / spec.pas.shaping_length +
        spec.pas.gamma();
  }

  if (!meta_path.empty()) {
    std::ofstream mf(meta_path);
    if (!mf) throw std::runtime_error("cannot open " + meta_path);
    mf << meta.dump(2) << '\n';
  } else {
    std::cerr << meta.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constellation shaping toolkit (sphere shaping, analysis, PAS link simulation)"};
  app.require_subcommand(1);

  // trellis-info
  TrellisOptions info_opt;
  bool info_trim = false, info_json = false;
  std::string info_dump;
  auto* info = app.add_subcommand("trellis-info",
                                  "codebook size, rates, energies and bounds");
  add_trellis_options(info, info_opt, true);
  info->add_flag("--trim", info_trim, "remove top-shell branches toward 2^k");
  info->add_flag("--json", info_json, "machine-readable output");
  info->add_option("--dump", info_dump, "write trellis counts to a file");

  // shape / deshape
  TrellisOptions shape_opt, deshape_opt;
  std::string shape_in, shape_out, deshape_in, deshape_out;
  auto* shape = app.add_subcommand("shape", "map hex index blocks to amplitude lines");
  add_trellis_options(shape, shape_opt, true);
  shape->add_option("-i,--in", shape_in, "hex block file, one k-bit block per line")
      ->required();
  shape->add_option("-o,--out", shape_out, "amplitude output file (default stdout)");
  auto* deshape = app.add_subcommand("deshape", "map amplitude lines back to hex blocks");
  add_trellis_options(deshape, deshape_opt, true);
  deshape->add_option("-i,--in", deshape_in, "amplitude file, one sequence per line")
      ->required();
  deshape->add_option("-o,--out", deshape_out, "hex output file (default stdout)");

  // rate-loss-sweep
  int sweep_m = 3;
  double sweep_rate = 1.75;
  std::vector<int> sweep_n;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("rate-loss-sweep",
                                   "sphere/shell/cc rate losses over block lengths");
  sweep->add_option("-m,--bits-per-symbol", sweep_m, "ASK bit levels");
  sweep->add_option("-r,--rate", sweep_rate, "target shaping rate bit/amp");
  sweep->add_option("-n,--n-list", sweep_n, "block lengths")
      ->required()
      ->delimiter(',');
  sweep->add_option("-o,--out", sweep_out, "CSV output file (default stdout)");

  // wachsmann
  int wm = 3;
  double wrate = 1.5, whx_min = 1.6, whx_max = 3.0, whx_step = 0.01;
  std::string wout;
  auto* wach = app.add_subcommand("wachsmann",
                                  "gap-to-capacity versus channel input entropy");
  wach->add_option("-m,--bits-per-symbol", wm, "ASK bit levels");
  wach->add_option("-r,--rate", wrate, "target transmission rate bit/1-D");
  wach->add_option("--hx-min", whx_min, "grid start");
  wach->add_option("--hx-max", whx_max, "grid end");
  wach->add_option("--hx-step", whx_step, "grid step");
  wach->add_option("-o,--out", wout, "CSV output file (default stdout)");

  // complexity
  TrellisOptions cx_opt;
  std::string cx_method = "ess";
  double cx_rs = -1.0;
  bool cx_json = false;
  auto* cx = app.add_subcommand("complexity", "arithmetic and storage bounds");
  cx->add_option("--method", cx_method, "ess | laroia1 | sm")
      ->check(CLI::IsMember({"ess", "laroia1", "sm"}));
  add_trellis_options(cx, cx_opt, true);
  cx->add_option("--rs", cx_rs, "override the shaping rate used in the bounds");
  cx->add_flag("--json", cx_json, "machine-readable output");

  // simulate
  std::string sim_config, sim_out, sim_meta;
  int sim_threads = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo FER scan from a config file");
  sim->add_option("-c,--config", sim_config, "key=value simulation config")->required();
  sim->add_option("-o,--out", sim_out, "CSV output file (default stdout)");
  sim->add_option("--meta", sim_meta, "JSON metadata file (default stderr)");
  sim->add_option("--threads", sim_threads, "worker threads (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*info)
      run_trellis_info(info_opt, info_trim, info_json, info_dump);
    else if (*shape)
      run_shape(shape_opt, shape_in, shape_out, false);
    else if (*deshape)
      run_shape(deshape_opt, deshape_in, deshape_out, true);
    else if (*sweep)
      run_rate_loss_sweep(sweep_m, sweep_rate, sweep_n, sweep_out);
    else if (*wach)
      run_wachsmann(wm, wrate, whx_min, whx_max, whx_step, wout);
    else if (*cx)
      run_complexity(cx_method, cx_opt, cx_rs, cx_json);
    else if (*sim)
      run_simulate(sim_config, sim_out, sim_meta, sim_threads);
  } catch (const ess::ConfigError& e) {
    std::cerr << "error: invalid configuration:\n";
    for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
    return 1;
  } catch (const ess::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
