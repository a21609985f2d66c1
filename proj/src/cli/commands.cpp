#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "cli/acceptance.hpp"
#include "cli/experiments.hpp"
#include "cli/state_spec.hpp"
#include "cvtele/channel.hpp"
#include "cvtele/dense_coding.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/gaussian.hpp"
#include "cvtele/parallel.hpp"
#include "cvtele/teleport.hpp"

namespace cvtele::cli {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kDefaultsVersion = 1;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string(); }

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write '" + path + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string output_prefix(const RunConfig& c) {
  std::string prefix = c.out.empty() ? "cvtele_" + c.command : c.out;
  const std::filesystem::path parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  return prefix;
}

void write_manifest(const std::string& path, const json& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << manifest.dump(2) << '\n';
}

json grid_json(const ChannelConfig& cfg) {
  return {{"extent", cfg.extent},
          {"resolution", cfg.resolution},
          {"spacing", cfg.extent > 0.0 ? 2.0 * cfg.extent / (cfg.resolution - 1) : 0.0},
          {"quadrature", cfg.quadrature == Quadrature::GaussHermite ? "gauss-hermite" : "trapezoid"},
          {"hermite_order", cfg.hermite_order}};
}

ChannelConfig channel_config(const RunConfig& c) {
  ChannelConfig cfg;
  cfg.extent = c.extent;
  if (c.resolution) {
    cfg.resolution = *c.resolution;
    cfg.adaptive = false;
  }
  cfg.renormalize = c.renormalize;
  if (c.quadrature == "gauss-hermite") {
    cfg.quadrature = Quadrature::GaussHermite;
  } else if (c.quadrature != "trapezoid") {
    throw ConfigError("quadrature must be 'trapezoid' or 'gauss-hermite'");
  }
  cfg.validate();
  return cfg;
}

struct Run {
  RunConfig config;
  std::string prefix;
  json manifest = json::object();
  std::vector<std::string> outputs;

  explicit Run(RunConfig c) : config(std::move(c)), prefix(output_prefix(config)) {}

  CsvWriter csv(const std::string& suffix, const std::vector<std::string>& header) {
    outputs.push_back(prefix + suffix + ".csv");
    return CsvWriter(outputs.back(), header);
  }
};

// ---------------------------------------------------------------------------
// kernel

int cmd_kernel(Run& run) {
  RunConfig& c = run.config;
  const FockDim dim(c.n_max.value_or(kDefaultNMax));
  c.n_max = dim.n();
  std::optional<double> r;
  TwoModeState w = [&] {
    if (!c.state.empty()) return load_resource(c.state, dim);
    if (c.r.empty()) c.r = {0.5};
    if (c.r.size() != 1) throw ConfigError("kernel takes a single --r");
    r = c.r.front();
    return tmsv(*r, dim);
  }();
  ChannelConfig cfg = channel_config(c);
  const EprMoments m = epr_moments(w);
  cfg = with_extent(cfg, std::max(m.var_x_diff, m.var_p_sum), 0.0);
  const Kernel k = kernel_from(w, cfg);

  CsvWriter out = run.csv("", {"x", "p", "kernel", "closed_form", "abs_error"});
  double max_err = 0.0, peak = 0.0;
  for (const auto& s : k.samples()) {
    peak = std::max(peak, s.value);
    if (r) {
      const double closed = gaussian_kernel_value(std::exp(-2.0 * *r), s.pt);
      max_err = std::max(max_err, std::abs(s.value - closed));
      out.row({fmt(s.pt.x), fmt(s.pt.p), fmt(s.value), fmt(closed), fmt(std::abs(s.value - closed))});
    } else {
      out.row({fmt(s.pt.x), fmt(s.pt.p), fmt(s.value), "", ""});
    }
  }
  const double norm = k.normalization();
  const auto [xx, pp] = k.second_moments();
  const bool ok = std::abs(norm - 1.0) <= 1e-3;
  run.manifest["checks"] = r ? json{"kernel-from-resource", "tmsv-gaussian-kernel"} : json{"kernel-from-resource"};
  run.manifest["grid"] = grid_json(cfg);
  run.manifest["grid"]["resolution"] = k.resolution();
  run.manifest["leakage"] = {{"resource_leakage", w.leakage()}, {"normalization", norm}};
  run.manifest["results"] = {{"normalization", norm},
                             {"normalization_within_tolerance", ok},
                             {"peak", peak},
                             {"second_moments", {xx, pp}},
                             {"epr_variances", {m.var_x_diff, m.var_p_sum}}};
  if (r) {
    run.manifest["results"]["nbar"] = std::exp(-2.0 * *r);
    run.manifest["results"]["max_abs_error_vs_closed_form"] = max_err;
  }
  return ok ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// teleport

struct PathRow {
  std::string path;
  double nbar = std::nan("");
  double trace = std::nan("");
  double deficit = std::nan("");
  double fidelity = std::nan("");
  double distance = std::nan("");  // to the row's reference
  std::string reference;
};

PathRow path_row(std::string path, double nbar, double trace, double deficit, double fid,
                 double distance = std::nan(""), std::string reference = {}) {
  return {std::move(path), nbar, trace, deficit, fid, distance, std::move(reference)};
}

int cmd_teleport(Run& run) {
  RunConfig& c = run.config;
  const FockDim dim(c.n_max.value_or(kDefaultNMax));
  c.n_max = dim.n();
  const ChannelConfig base = channel_config(c);
  const DensityMatrix rho = parse_state(c.input, dim);
  const bool pure = rho.purity() >= (1.0 - 1e-8) * rho.trace() * rho.trace();
  std::vector<PathRow> rows;
  json results = json::object();
  json checks = json::array();
  bool ok = true;

  auto channel_only = [&](double nbar) {
    const Kernel k = gaussian_kernel(nbar);
    const DensityMatrix out = apply_channel(k, rho, base);
    PathRow ch = path_row("channel", nbar, out.trace(), rho.trace() - out.trace(), fidelity(rho, out));
    checks.push_back("channel-map");
    if (is_coherent_spec(c.input)) {
      const DensityMatrix th = apply_thermal_form({{1.0, coherent_amplitude(c.input)}}, nbar, dim);
      ch.distance = trace_distance(out, th);
      ch.reference = "thermal-form";
      ok = ok && ch.distance <= 1e-3;
      rows.push_back(ch);
      rows.push_back(path_row("thermal-form", nbar, th.trace(), 1.0 - th.trace(), fidelity(rho, th)));
      const GaussianState g = GaussianState::coherent(coherent_amplitude(c.input));
      rows.push_back(path_row("gaussian", nbar, 1.0, 0.0, gaussian_fidelity(g, apply_gaussian_channel(g, nbar))));
      checks.push_back("thermal-form");
    } else {
      rows.push_back(ch);
    }
    if (pure) {
      rows.push_back(path_row("kernel-fidelity", nbar, std::nan(""), std::nan(""), fidelity_via_kernel(k, rho, base)));
      checks.push_back("kernel-fidelity");
    }
    if (nbar == 0.0) {
      ok = ok && out.data() == rho.data();
      checks.push_back("identity-branch");
    }
    results["nbar"] = nbar;
    run.manifest["grid"] = grid_json(with_extent(base, nbar, rho.mean_photon()));
    run.manifest["leakage"] = {{"input_leakage", rho.leakage()}, {"channel_trace_deficit", rho.trace() - out.trace()}};
  };

  if (c.nbar) {
    if (c.transmission || !c.r.empty() || !c.state.empty()) {
      throw ConfigError("--nbar excludes --r, --T and --state");
    }
    channel_only(*c.nbar);
  } else if (c.transmission) {
    if (c.r.size() != 1 || !c.state.empty()) throw ConfigError("--T needs a single --r and no --state");
    const double nbar = noisy_nbar(c.r.front(), *c.transmission);
    results["noisy_substitution"] = {{"r", c.r.front()}, {"T", *c.transmission}, {"nbar", nbar}};
    checks.push_back("noisy-substitution");
    channel_only(nbar);
  } else {
    if (c.r.empty() == c.state.empty()) throw ConfigError("teleport needs exactly one of --r, --state or --nbar");
    if (c.r.size() > 1) throw ConfigError("teleport takes a single --r");
    const TwoModeState w = c.state.empty() ? tmsv(c.r.front(), dim) : load_resource(c.state, dim);
    const ChannelConfig cfg = protocol_config(rho, w, base);
    const AveragedOutput avg = average_output(rho, w, cfg);
    const Kernel k = kernel_from(w, cfg);
    const DensityMatrix out = apply_channel(k, rho, cfg);
    const EprMoments m = epr_moments(w);
    const double kernel_nbar = std::max(m.var_x_diff, m.var_p_sum);
    const double td = trace_distance(avg.state, out);
    ok = td <= 1e-3;
    rows.push_back(path_row("channel", kernel_nbar, out.trace(), rho.trace() - out.trace(), fidelity(rho, out)));
    rows.push_back(path_row("oracle", kernel_nbar, avg.state.trace(), rho.trace() - avg.state.trace(),
                    fidelity(rho, avg.state), td, "channel"));
    if (pure) rows.push_back(path_row("kernel-fidelity", kernel_nbar, std::nan(""), std::nan(""), fidelity_via_kernel(k, rho, cfg)));
    checks = {"channel-map", "protocol-average", "kernel-from-resource"};
    if (pure) checks.push_back("kernel-fidelity");
    results["trace_distance_oracle_vs_channel"] = td;
    results["outcome_mass"] = avg.outcome_mass;
    results["epr_variances"] = {m.var_x_diff, m.var_p_sum};
    run.manifest["grid"] = grid_json(cfg);
    run.manifest["leakage"] = {{"input_leakage", rho.leakage()},
                               {"resource_leakage", w.leakage()},
                               {"channel_trace_deficit", rho.trace() - out.trace()},
                               {"oracle_trace_deficit", rho.trace() - avg.state.trace()},
                               {"outcome_mass_defect", 1.0 - avg.outcome_mass}};

    if (c.samples && *c.samples > 0) {
      const auto outcomes = sample_outcomes(rho, w, *c.samples, c.seed, cfg);
      CsvWriter so = run.csv("_outcomes", {"x", "p", "density", "conditional_fidelity"});
      for (const auto& o : outcomes) {
        so.row({fmt(o.pt.x), fmt(o.pt.p), fmt(o.density), o.state ? fmt(fidelity(rho, *o.state)) : ""});
      }
      results["samples"] = *c.samples;
    }
  }

  CsvWriter summary = run.csv("", {"path", "nbar", "trace", "trace_deficit", "fidelity",
                                   "trace_distance_to_reference", "reference"});
  json jrows = json::array();
  for (const auto& r : rows) {
    summary.row({r.path, fmt(r.nbar), fmt(r.trace), fmt(r.deficit), fmt(r.fidelity), fmt(r.distance), r.reference});
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    jrows.push_back({{"path", r.path}, {"nbar", num(r.nbar)}, {"trace", num(r.trace)},
                     {"trace_deficit", num(r.deficit)}, {"fidelity", num(r.fidelity)},
                     {"trace_distance_to_reference", num(r.distance)}, {"reference", r.reference}});
  }
  results["paths"] = jrows;
  results["within_tolerance"] = ok;
  run.manifest["checks"] = checks;
  run.manifest["results"] = results;
  return ok ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// fidelity-sweep

int cmd_fidelity_sweep(Run& run) {
  RunConfig& c = run.config;
  const bool auto_size = !c.n_max.has_value();
  const int n_max = c.n_max.value_or(kDefaultNMax);
  c.n_max = n_max;
  if (!(c.r_step > 0.0) || c.r_min < 0.0 || c.r_max < c.r_min) throw ConfigError("bad r range");
  const ChannelConfig base = channel_config(c);
  std::vector<double> rs = c.r;
  if (rs.empty()) {
    const int steps = static_cast<int>(std::floor((c.r_max - c.r_min) / c.r_step + 1e-9));
    for (int i = 0; i <= steps; ++i) rs.push_back(c.r_min + i * c.r_step);
  }
  const bool coherent = is_coherent_spec(c.input);

  CsvWriter out = run.csv("", {"r", "nbar", "n_max", "n_max_oracle", "f_kernel", "f_channel", "f_oracle",
                               "f_gaussian", "f_analytic", "spread"});
  json rows = json::array();
  double worst = 0.0;
  bool monotone = true;
  double previous = -1.0;
  for (double r : rs) {
    const FidelityPoint f = fidelity_point(c.input, r, n_max, auto_size, base);
    out.row({fmt(r), fmt(f.nbar), std::to_string(f.n_max), std::to_string(f.n_max_oracle), fmt(f.f_kernel),
             fmt(f.f_channel), fmt(f.f_oracle), fmt(f.f_gaussian), fmt(f.f_analytic), fmt(f.spread())});
    rows.push_back({{"r", r}, {"n_max_oracle", f.n_max_oracle}, {"f_oracle", f.f_oracle}, {"spread", f.spread()}});
    worst = std::max(worst, f.spread());
    if (f.f_oracle <= previous) monotone = false;
    previous = f.f_oracle;
  }
  const bool ok = coherent ? worst <= 1e-3 : monotone;
  run.manifest["checks"] = {"kernel-fidelity", "channel-map", "protocol-average", "tmsv-gaussian-kernel"};
  run.manifest["grid"] = grid_json(base);
  run.manifest["grid"]["rule"] = "per point: extent from the default rule, oracle resolution refined against the kernel";
  run.manifest["leakage"] = {{"oracle_n_max_rule", "smallest n_max >= floor with tanh(r)^n_max <= 1e-6"},
                             {"auto_sized", auto_size}};
  run.manifest["results"] = {{"max_spread", worst}, {"monotone_in_r", monotone}, {"rows", rows},
                             {"within_tolerance", ok}};
  return ok ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// densecode

int cmd_densecode(Run& run) {
  RunConfig& c = run.config;
  const int floor_n = c.n_max.value_or(kDefaultNMax);
  c.n_max = floor_n;
  if (c.r.empty()) c.r = {1.0};
  const double t = c.transmission.value_or(1.0);
  c.transmission = t;
  const std::size_t samples = c.samples.value_or(100000);
  c.samples = samples;
  if (samples < 2) throw ConfigError("densecode needs --samples >= 2");
  const ChannelConfig base = channel_config(c);

  const std::vector<PhasePoint> messages = gaussian_messages(samples, c.signal_var, c.seed);
  CsvWriter table = run.csv("", {"r", "T", "nbar", "signal_var", "MI_closed_form", "MI_empirical", "samples", "model"});
  CsvWriter slice = run.csv("_slice", {"r", "axis", "measured_x", "measured_p", "channel_matrix", "closed_form"});
  json rows = json::array();
  bool ok = true;

  for (double r : c.r) {
    double nbar = noisy_nbar(r, t);
    std::optional<DenseCodingChannel> channel;
    std::string model;
    std::optional<TwoModeState> w;
    if (!c.state.empty()) {
      w = load_resource(c.state, FockDim(floor_n));
      const EprMoments m = epr_moments(*w);
      nbar = std::max(m.var_x_diff, m.var_p_sum);
      model = "resource-file";
    } else if (t == 1.0) {
      w = tmsv(r, FockDim(oracle_n_max(r, floor_n)));
      model = "tmsv";
    } else {
      model = "gaussian-noisy";
    }
    channel = w ? DenseCodingChannel::from_resource(*w, base) : noisy_dense_coding(r, t);

    const std::vector<PhasePoint> received = simulate_transmission(*channel, messages, c.seed + 1);
    std::vector<PhasePoint> errors(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      errors[i] = {messages[i].x - received[i].x, received[i].p - messages[i].p};
    }
    const Eigen::Matrix2d cov = sample_covariance(errors);
    const double mi_emp = mutual_information_histogram(messages, received);
    const std::optional<double> mi_closed =
        nbar > 0.0 ? std::optional<double>(mutual_information_gaussian(c.signal_var, nbar)) : std::nullopt;
    if (samples >= 100000 && mi_closed && std::abs(mi_emp - *mi_closed) > 0.1) ok = false;
    table.row({fmt(r), fmt(t), fmt(nbar), fmt(c.signal_var), fmt(mi_closed), fmt(mi_emp), std::to_string(samples), model});
    rows.push_back({{"r", r}, {"nbar", nbar}, {"model", model}, {"mi_empirical", mi_emp},
                    {"mi_closed_form", mi_closed ? json(*mi_closed) : json(nullptr)},
                    {"error_covariance", {{cov(0, 0), cov(0, 1)}, {cov(1, 0), cov(1, 1)}}}});

    // Slices through the channel matrix for a message at the origin.
    const double reach = 4.0 * std::sqrt(std::max(nbar, 0.05));
    for (int i = -40; i <= 40; ++i) {
      const double s = reach * i / 40.0;
      for (const auto& [axis, pt] : {std::pair{"x", PhasePoint{s, 0.0}}, std::pair{"p", PhasePoint{0.0, s}}}) {
        const double value = w ? channel_matrix(*w, {0.0, 0.0}, pt)
                               : (nbar > 0.0 ? channel->probability({0.0, 0.0}, pt) : std::nan(""));
        const double closed = model == "resource-file" || nbar == 0.0
                                  ? std::nan("")
                                  : gaussian_kernel_value(nbar, {-pt.x, pt.p});
        slice.row({fmt(r), axis, fmt(pt.x), fmt(pt.p), fmt(value), fmt(closed)});
      }
    }
  }
  run.manifest["checks"] = {"dense-coding-channel-matrix", "tmsv-gaussian-kernel", "noisy-substitution"};
  run.manifest["grid"] = grid_json(base);
  run.manifest["leakage"] = {{"oracle_n_max_rule", "smallest n_max >= floor with tanh(r)^n_max <= 1e-6"}};
  run.manifest["results"] = {{"rows", rows}, {"within_tolerance", ok},
                             {"mi_estimator", "plug-in, Freedman-Diaconis bins, per quadrature, summed"}};
  return ok ? kExitOk : kExitAcceptance;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(Run& run) {
  RunConfig& c = run.config;
  const auto& matrix = acceptance_matrix();
  if (c.list) {
    for (const auto& info : matrix) std::cout << "[" << info.id << "] " << info.name << "  " << info.summary << '\n';
    run.manifest["results"] = {{"listed", matrix.size()}};
    return kExitOk;
  }
  AcceptanceOptions opts;
  opts.n_max = c.n_max.value_or(kDefaultNMax);
  opts.seed = c.seed;
  c.n_max = opts.n_max;
  std::vector<int> ids = c.only;
  if (ids.empty()) {
    for (const auto& info : matrix) ids.push_back(info.id);
  }
  CsvWriter out = run.csv("", {"id", "name", "pass", "seconds", "detail"});
  json results = json::array();
  json tags = json::array();
  bool all = true;
  for (int id : ids) {
    const CheckResult r = run_check(id, opts);
    std::cout << format_result(r) << std::endl;
    std::string detail = r.detail;
    for (char& ch : detail) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out.row({std::to_string(id), r.info.name, r.pass ? "1" : "0", fmt(r.seconds), detail});
    results.push_back(to_json(r));
    for (const auto& t : r.info.tags) tags.push_back(t);
    all = all && r.pass;
  }
  run.manifest["checks"] = tags;
  run.manifest["grid"] = grid_json(ChannelConfig{});
  run.manifest["leakage"] = {{"n_max", opts.n_max}, {"leakage_bound", kDefaultLeakageBound}};
  run.manifest["results"] = {{"checks", results}, {"all_passed", all}};
  return all ? kExitOk : kExitAcceptance;
}

}  // namespace

json to_json(const RunConfig& c) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return {{"command", c.command},   {"r", c.r},
          {"T", opt(c.transmission)}, {"nbar", opt(c.nbar)},
          {"n_max", opt(c.n_max)},  {"extent", c.extent},
          {"resolution", opt(c.resolution)}, {"renormalize", c.renormalize},
          {"quadrature", c.quadrature}, {"seed", c.seed},
          {"input", c.input},       {"state", c.state},
          {"samples", opt(c.samples)}, {"signal_var", c.signal_var},
          {"r_min", c.r_min},       {"r_max", c.r_max},
          {"r_step", c.r_step},     {"only", c.only},
          {"list", c.list},         {"out", c.out}};
}

void apply_overrides(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  // null clears an optional, so a manifest's "config" block can be fed back in
  auto opt = [](const json& v, auto& field) {
    using T = typename std::remove_reference_t<decltype(field)>::value_type;
    if (v.is_null()) {
      field.reset();
    } else {
      field = v.get<T>();
    }
  };
  for (const auto& [raw, v] : j.items()) {
    std::string key = raw;
    std::replace(key.begin(), key.end(), '-', '_');
    try {
      if (key == "command") {
        const auto cmd = v.get<std::string>();
        if (!c.command.empty() && cmd != c.command) {
          throw ConfigError("config file is for '" + cmd + "', not '" + c.command + "'");
        }
        c.command = cmd;
      } else if (key == "r") {
        c.r = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      } else if (key == "T" || key == "t" || key == "transmission") {
        opt(v, c.transmission);
      } else if (key == "nbar") {
        opt(v, c.nbar);
      } else if (key == "n_max") {
        opt(v, c.n_max);
      } else if (key == "extent") {
        c.extent = v.get<double>();
      } else if (key == "resolution") {
        opt(v, c.resolution);
      } else if (key == "renormalize") {
        c.renormalize = v.get<bool>();
      } else if (key == "quadrature") {
        c.quadrature = v.get<std::string>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "input") {
        c.input = v.get<std::string>();
      } else if (key == "state") {
        c.state = v.get<std::string>();
      } else if (key == "samples") {
        opt(v, c.samples);
      } else if (key == "signal_var") {
        c.signal_var = v.get<double>();
      } else if (key == "r_min") {
        c.r_min = v.get<double>();
      } else if (key == "r_max") {
        c.r_max = v.get<double>();
      } else if (key == "r_step") {
        c.r_step = v.get<double>();
      } else if (key == "only") {
        c.only = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      } else if (key == "list") {
        c.list = v.get<bool>();
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else {
        throw ConfigError("unknown config key '" + raw + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + raw + "': " + e.what());
    }
  }
}

json defaults_table() {
  const ChannelConfig d;
  return {{"version", kDefaultsVersion},
          {"n_max", kDefaultNMax},
          {"resolution", d.resolution},
          {"extent_rule", "5*sqrt(max(nbar,1) + <n>_input + <n>_resource + 1)"},
          {"refinement", {{"tolerance", 1e-5}, {"max_doublings", 3}, {"rule", "res -> 2(res-1)+1"}}},
          {"leakage_bound", d.leakage_bound},
          {"kernel_tolerance", d.kernel_tolerance},
          {"hermite_order", d.hermite_order},
          {"renormalize", d.renormalize},
          {"degenerate_density", kDegenerateDensity},
          {"outcome_mass_tolerance", 1e-2},
          {"equivalence_tolerance", 1e-3},
          {"oracle_tail", 1e-6},
          {"reduction_blocks", kReductionBlocks},
          {"seed", 7},
          {"densecode", {{"samples", 100000}, {"signal_var", 2.0}, {"mi_tolerance", 0.1}}}};
}

int dispatch(RunConfig c) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run(std::move(c));
  int code = kExitOk;
  const std::string& cmd = run.config.command;
  if (cmd == "kernel") {
    code = cmd_kernel(run);
  } else if (cmd == "teleport") {
    code = cmd_teleport(run);
  } else if (cmd == "fidelity-sweep") {
    code = cmd_fidelity_sweep(run);
  } else if (cmd == "densecode") {
    code = cmd_densecode(run);
  } else if (cmd == "verify") {
    code = cmd_verify(run);
  } else {
    throw ConfigError("unknown command '" + cmd + "'");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json m = {{"tool", "cvtele"},
            {"tool_version", kToolVersion},
            {"command", cmd},
            {"config", to_json(run.config)},
            {"defaults", defaults_table()},
            {"threads", worker_threads()},
            {"wall_time_seconds", wall},
            {"exit_code", code}};
  for (auto& [k, v] : run.manifest.items()) m[k] = v;
  m["outputs"] = run.outputs;
  write_manifest(run.prefix + ".json", m);
  return code;
}

int run(int argc, char** argv) {
  CLI::App app{"Continuous-variable teleportation and dense coding simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunConfig c;
  std::string config_file;
  double transmission = 0.0, nbar = 0.0;
  std::size_t samples = 0;
  int n_max = 0, resolution = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--n-max", n_max, "Fock cutoff (levels 0..n_max-1)");
    sub->add_option("--extent", c.extent, "grid half-width L; 0 = default rule");
    sub->add_option("--resolution", resolution, "grid points per axis (odd, >= 41); disables refinement");
    sub->add_option("--seed", c.seed, "master RNG seed");
    sub->add_option("--out", c.out, "output path prefix for <prefix>.csv and <prefix>.json");
    sub->add_option("--config", config_file, "JSON file whose keys override flags");
  };
  auto resource = [&](CLI::App* sub, bool list) {
    auto* o = sub->add_option("--r", c.r, list ? "squeezing parameter(s)" : "squeezing parameter");
    if (list) o->delimiter(',');
    sub->add_option("--state", c.state, "resource file (dense JSON, {\"tmsv\": r} or {\"tmsv_mixture\": [[w, r], ...]})");
  };

  CLI::App* kernel = app.add_subcommand("kernel", "sample the kernel of a resource on the phase-space grid");
  resource(kernel, false);
  common(kernel);

  CLI::App* teleport = app.add_subcommand("teleport", "protocol oracle vs channel map for one input");
  resource(teleport, false);
  teleport->add_option("--T", transmission, "transmission of the noisy resource channel");
  teleport->add_option("--nbar", nbar, "Gaussian kernel variance (channel only)");
  teleport->add_option("--input", c.input, "vacuum | fock:n | coherent:re[,im] | cat:alpha[,phase] | thermal:nbar");
  teleport->add_option("--samples", samples, "also draw this many outcomes by rejection sampling");
  teleport->add_flag("--renormalize", c.renormalize, "renormalize channel outputs");
  teleport->add_option("--quadrature", c.quadrature, "trapezoid | gauss-hermite (Gaussian kernels)");
  common(teleport);

  CLI::App* sweep = app.add_subcommand("fidelity-sweep", "fidelity vs r by every available path");
  sweep->add_option("--input", c.input, "input state spec");
  sweep->add_option("--r", c.r, "explicit r values")->delimiter(',');
  sweep->add_option("--r-min", c.r_min, "first r");
  sweep->add_option("--r-max", c.r_max, "last r");
  sweep->add_option("--r-step", c.r_step, "r increment");
  sweep->add_option("--quadrature", c.quadrature, "trapezoid | gauss-hermite (Gaussian kernels)");
  common(sweep);

  CLI::App* dense = app.add_subcommand("densecode", "channel matrix slices, transmission simulation, MI table");
  resource(dense, true);
  dense->add_option("--T", transmission, "transmission of the noisy resource channel");
  dense->add_option("--samples", samples, "messages to simulate (default 100000)");
  dense->add_option("--signal-var", c.signal_var, "per-quadrature variance of the message prior");
  common(dense);

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance matrix");
  verify->add_flag("--list", c.list, "print the check matrix without running it");
  verify->add_option("--only", c.only, "check ids to run")->delimiter(',');
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  auto given = [&](const char* flag) {
    try {
      return sub->get_option(flag)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--n-max")) c.n_max = n_max;
  if (given("--resolution")) c.resolution = resolution;
  if (given("--T")) c.transmission = transmission;
  if (given("--nbar")) c.nbar = nbar;
  if (given("--samples")) c.samples = samples;

  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot read config file '" + config_file + "'");
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError("config file '" + config_file + "': " + e.what());
      }
      apply_overrides(c, j);
    }
    return dispatch(std::move(c));
  } catch (const ConfigError& e) {
    std::cerr << "cvtele: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "cvtele: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "cvtele: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "cvtele: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "cvtele: " << e.what() << '\n';
    return kExitAcceptance;
  }
}

}  // namespace cvtele::cli
