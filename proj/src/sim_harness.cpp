#include "afbm/sim_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace afbm {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw config_error("invalid value for key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw config_error("invalid value for key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw config_error("invalid value for key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw config_error("invalid value for key '" + key + "': empty list");
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string opt_str(double v) { return std::isnan(v) ? "default" : fmt(v); }

double opt_double(const std::string& key, const std::string& v) { return v == "default" ? kNaN : to_double(key, v); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& p, const std::string& header) : os_(p) {
    if (!os_) throw std::runtime_error("cannot write " + p.string());
    os_ << std::setprecision(17) << header << '\n';
  }
  template <class... Ts> void row(const Ts&... vals) {
    bool first = true;
    ((os_ << (first ? "" : ",") << vals, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

double chirp_or(double override_v, double preset) { return std::isnan(override_v) ? preset : override_v; }

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Papr: return "papr";
    case Experiment::Psd: return "psd";
    case Experiment::Af: return "af";
    case Experiment::Ber: return "ber";
    case Experiment::Sense: return "sense";
    case Experiment::Loopback: return "loopback";
    case Experiment::Gram: return "gram";
  }
  return "?";
}

std::string to_string(WaveformKind w) {
  switch (w) {
    case WaveformKind::AfbmPhydyas: return "afbm-phydyas";
    case WaveformKind::AfbmHermite: return "afbm-hermite";
    case WaveformKind::Afdm: return "afdm";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::Papr, Experiment::Psd, Experiment::Af, Experiment::Ber, Experiment::Sense,
                 Experiment::Loopback, Experiment::Gram})
    if (to_string(e) == s) return e;
  throw config_error("invalid value for key 'experiment': unknown experiment '" + s + "'");
}

WaveformKind parse_waveform(const std::string& s) {
  for (auto w : {WaveformKind::AfbmPhydyas, WaveformKind::AfbmHermite, WaveformKind::Afdm})
    if (to_string(w) == s) return w;
  throw config_error("invalid value for key 'waveform': unknown waveform '" + s + "'");
}

ExperimentConfig::ExperimentConfig() : c1_L(kNaN), c2_L(kNaN), c1_P(kNaN), c2_P(kNaN), c1_N(kNaN), c2_N(kNaN) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "waveform", "L", "N", "P", "K", "O", "c1_L", "c2_L", "c1_P", "c2_P", "c1_N", "c2_N", "R",
      "ell_max", "f_max", "xi", "fc", "bandwidth", "Es", "i_max", "beta", "pda_i_max", "pda_beta", "grid_delay",
      "grid_doppler", "snr", "trials", "seed", "oversample", "large", "export_channels", "out"};
  return keys;
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto pos_int = [&](long long lo) {
    long long x = to_int(key, v);
    if (x < lo) throw config_error("invalid value for key '" + key + "': must be >= " + std::to_string(lo));
    return static_cast<Index>(x);
  };
  if (key == "experiment") c.experiment = parse_experiment(v);
  else if (key == "waveform") c.waveform = parse_waveform(v);
  else if (key == "L") c.L = pos_int(1);
  else if (key == "N") c.N = pos_int(1);
  else if (key == "P") c.P = pos_int(1);
  else if (key == "K") c.K = pos_int(1);
  else if (key == "O") {
    // overlap follows from the filter; accepted only as a consistency check
    const double o = to_double(key, v);
    c.explicit_keys.insert("O=" + fmt(o));
  } else if (key == "c1_L") c.c1_L = opt_double(key, v);
  else if (key == "c2_L") c.c2_L = opt_double(key, v);
  else if (key == "c1_P") c.c1_P = opt_double(key, v);
  else if (key == "c2_P") c.c2_P = opt_double(key, v);
  else if (key == "c1_N") c.c1_N = opt_double(key, v);
  else if (key == "c2_N") c.c2_N = opt_double(key, v);
  else if (key == "R") c.R = pos_int(1);
  else if (key == "ell_max") c.ell_max = pos_int(0);
  else if (key == "f_max") c.f_max = to_double(key, v);
  else if (key == "xi") c.xi = pos_int(0);
  else if (key == "fc") c.fc = to_double(key, v);
  else if (key == "bandwidth") c.bandwidth = to_double(key, v);
  else if (key == "Es") c.Es = to_double(key, v);
  else if (key == "i_max") c.i_max = static_cast<int>(pos_int(1));
  else if (key == "beta") c.beta = to_double(key, v);
  else if (key == "pda_i_max") c.pda_i_max = static_cast<int>(pos_int(1));
  else if (key == "pda_beta") c.pda_beta = to_double(key, v);
  else if (key == "grid_delay") c.grid_delay = pos_int(1);
  else if (key == "grid_doppler") c.grid_doppler = pos_int(1);
  else if (key == "snr") c.snr_db = to_list(key, v);
  else if (key == "trials") c.trials = pos_int(1);
  else if (key == "seed") {
    long long s = to_int(key, v);
    if (s < 0) throw config_error("invalid value for key 'seed': must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "oversample") c.oversample = pos_int(1);
  else if (key == "large") c.large = to_bool(key, v);
  else if (key == "export_channels") c.export_channels = to_bool(key, v);
  else if (key == "out") c.out = v;
  else throw config_error("unknown key '" + key + "'");
  c.explicit_keys.insert(key);
}

void apply_config_text(ExperimentConfig& c, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key=value");
    set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  apply_config_text(c, text);
  return c;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream o;
  o << "experiment=" << to_string(experiment) << '\n'
    << "waveform=" << to_string(waveform) << '\n'
    << "L=" << L << "\nN=" << N << "\nP=" << P << "\nK=" << K << '\n'
    << "c1_L=" << opt_str(c1_L) << "\nc2_L=" << opt_str(c2_L) << "\nc1_P=" << opt_str(c1_P) << "\nc2_P=" << opt_str(c2_P)
    << "\nc1_N=" << opt_str(c1_N) << "\nc2_N=" << opt_str(c2_N) << '\n'
    << "R=" << R << "\nell_max=" << ell_max << "\nf_max=" << fmt(f_max) << "\nxi=" << xi << '\n'
    << "fc=" << fmt(fc) << "\nbandwidth=" << fmt(bandwidth) << "\nEs=" << fmt(Es) << '\n'
    << "i_max=" << i_max << "\nbeta=" << fmt(beta) << "\npda_i_max=" << pda_i_max << "\npda_beta=" << fmt(pda_beta) << '\n'
    << "grid_delay=" << grid_delay << "\ngrid_doppler=" << grid_doppler << '\n'
    << "snr=" << list_str(snr_db) << "\ntrials=" << trials << "\nseed=" << seed << '\n'
    << "oversample=" << oversample << "\nlarge=" << (large ? "true" : "false")
    << "\nexport_channels=" << (export_channels ? "true" : "false") << "\nout=" << out << '\n';
  return o.str();
}

void finalize_config(ExperimentConfig& c) {
  auto unset = [&](const char* k) { return !c.explicit_keys.count(k); };
  // desk-scale dimensions unless asked for the full configuration
  if (!c.large && c.experiment == Experiment::Ber) {
    if (unset("L")) c.L = 64;
    if (unset("N")) c.N = 128;
    if (unset("P")) c.P = 128;
    if (unset("K")) c.K = 4;
    if (unset("ell_max")) c.ell_max = 8;
    if (unset("f_max")) c.f_max = 1.0;
  }
  if (c.experiment == Experiment::Sense) {
    if (!c.large) {
      if (unset("L")) c.L = 16;
      if (unset("N")) c.N = 32;
      if (unset("P")) c.P = 32;
      if (unset("K")) c.K = 2;
      // 8 integer delays; the Doppler span is what the budget leaves at P = 32
      if (unset("ell_max")) c.ell_max = 7;
      if (unset("f_max")) c.f_max = 1.5;
      if (unset("xi")) c.xi = 0;
    }
    if (unset("snr")) c.snr_db = {0, 10, 20};
    if (unset("trials")) c.trials = 500;
  }
  if (c.experiment == Experiment::Ber && unset("trials")) c.trials = 2000;
  if (c.experiment == Experiment::Psd && unset("P")) c.P = 3 * c.N / 4;

  if (c.L < 4 || c.L % 4 != 0) throw config_error("invalid value for key 'L': must be a positive multiple of 4");
  if (c.N % 2 != 0) throw config_error("invalid value for key 'N': must be even");
  if (c.P % 2 != 0) throw config_error("invalid value for key 'P': must be even");
  if (c.P > c.N) throw config_error("constraint violated for key 'P': P must be < N (P = N is the largest accepted value)");
  if (c.P < c.L) throw config_error("constraint violated for key 'P': P must be >= L");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw config_error("invalid value for key 'beta': must be in (0, 1)");
  if (!(c.pda_beta > 0.0 && c.pda_beta <= 1.0)) throw config_error("invalid value for key 'pda_beta': must be in (0, 1]");
  if (c.f_max < 0.0) throw config_error("invalid value for key 'f_max': must be >= 0");
  if (!(c.Es > 0.0)) throw config_error("invalid value for key 'Es': must be positive");
  if (c.R > c.ell_max + 1) throw config_error("constraint violated for key 'R': needs R <= ell_max + 1 distinct delays");
  for (const auto& k : c.explicit_keys)
    if (k.rfind("O=", 0) == 0) {
      const double o = std::stod(k.substr(2));
      const double want = c.waveform == WaveformKind::AfbmPhydyas ? 4.0 : c.waveform == WaveformKind::AfbmHermite ? 1.5 : 1.0;
      if (o != want) throw config_error("invalid value for key 'O': the " + to_string(c.waveform) + " overlap is " + fmt(want));
    }
  if (c.experiment == Experiment::Ber || c.experiment == Experiment::Sense) {
    ChannelBudget b{c.ell_max, c.f_max, c.xi, c.P};
    if (!validate_budget(b).ok)
      throw config_error("constraint violated for key 'P': orthogonality condition 2(f_max+xi)(ell_max+1)+ell_max <= P fails");
  }
}

WaveformParams afbm_params(const ExperimentConfig& c, FilterKind f) {
  WaveformParams p;
  p.L = c.L;
  p.N = c.N;
  p.P = c.P;
  p.K = c.K;
  p.filter = f;
  p.Es = c.Es;
  const double L2 = static_cast<double>(c.L * c.L), P2 = static_cast<double>(c.P * c.P), N2 = static_cast<double>(c.N * c.N);
  double c2L = 1.0 / (kPi * L2), c2P = 1.0 / (kPi * P2), c2N = 1.0 / (kPi * N2), c1P = 0.0;
  if (c.experiment == Experiment::Af) {
    c2L = kPi / L2;
    c2N = 0.0;
  }
  if (c.experiment == Experiment::Ber || c.experiment == Experiment::Sense || c.experiment == Experiment::Gram)
    c1P = validate_budget(ChannelBudget{c.ell_max, c.f_max, c.xi, c.P}).c1;
  p.chirp_L = {chirp_or(c.c1_L, 0.0), chirp_or(c.c2_L, c2L)};
  p.chirp_P = {chirp_or(c.c1_P, c1P), chirp_or(c.c2_P, c2P)};
  p.chirp_N = {chirp_or(c.c1_N, 0.0), chirp_or(c.c2_N, c2N)};
  return p;
}

AfdmParams afdm_params(const ExperimentConfig& c) {
  AfdmParams a = matched_afdm(afbm_params(c, FilterKind::Rectangular), c.f_max, c.xi);
  if (!std::isnan(c.c1_L)) a.chirp.c1 = c.c1_L;
  if (!std::isnan(c.c2_L)) a.chirp.c2 = c.c2_L;
  return a;
}

std::unique_ptr<Waveform> make_waveform(const ExperimentConfig& c, WaveformKind w) {
  switch (w) {
    case WaveformKind::AfbmPhydyas: return std::make_unique<AfbmModem>(afbm_params(c, FilterKind::Phydyas));
    case WaveformKind::AfbmHermite: return std::make_unique<AfbmModem>(afbm_params(c, FilterKind::Hermite));
    case WaveformKind::Afdm: return std::make_unique<AfdmModem>(afdm_params(c));
  }
  throw config_error("unknown waveform");
}

std::uint64_t trial_seed(std::uint64_t master, Index trial) { return master ^ static_cast<std::uint64_t>(trial); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

BerResult ber_sweep(const BerRequest& req) {
  const Waveform& wf = *req.wf;
  const Index S = wf.num_symbols(), M = wf.frame_length();
  const std::size_t ns = req.snr_db.size();
  std::vector<Index> eg(ns, 0), el(ns, 0);
  if (req.gabp_trace) req.gabp_trace->clear();
  using cf = Cx<float>;
  for (Index t = 0; t < req.trials; ++t) {
    std::mt19937_64 rng(trial_seed(req.seed, t));
    const auto paths = random_paths(req.R, req.budget, rng);
    const DDChannel ch(paths, M, wf.channel_c1(), req.doppler_period);
    const CVecd x = qpsk_symbols(S, rng, req.gabp.Es);
    const CVecd w = complex_normal_vector(M, rng, 1.0);
    const CMatd H = wf.obs_channel(ch);
    const CVecd r0 = H * x;
    const CVecd wb = wf.observe_vec(w);
    const CMat<float> Hf = H.cast<cf>();
    std::unique_ptr<GabpDetector<float>> det;
    std::unique_ptr<LmmseSolver<float>> lm;
    if (req.run_gabp) det = std::make_unique<GabpDetector<float>>(Hf);
    if (req.run_lmmse) lm = std::make_unique<LmmseSolver<float>>(Hf);
    for (std::size_t i = 0; i < ns; ++i) {
      const double s2 = req.gabp.Es / std::pow(10.0, req.snr_db[i] / 10.0);
      const CVec<float> r = (r0 + std::sqrt(s2) * wb).cast<cf>();
      if (det) {
        GabpConfig cfg = req.gabp;
        cfg.sigma2 = s2;
        std::vector<double>* tr = (req.gabp_trace && t == 0 && i + 1 == ns) ? req.gabp_trace : nullptr;
        const CVecd xh = det->detect(r, cfg, tr).cast<cd>();
        if (!xh.allFinite()) throw degenerate_error("GaBP produced non-finite estimates (trial " + std::to_string(t) + ")");
        eg[i] += qpsk_bit_errors(xh, x);
      }
      if (lm) {
        const CVecd xh = lm->solve(r, s2).cast<cd>();
        if (!xh.allFinite()) throw degenerate_error("LMMSE produced non-finite estimates (trial " + std::to_string(t) + ")");
        el[i] += qpsk_bit_errors(xh, x);
      }
    }
  }
  BerResult res;
  const double bits = 2.0 * static_cast<double>(S) * static_cast<double>(req.trials);
  for (auto* c : {&res.gabp, &res.lmmse}) {
    c->snr_db = req.snr_db;
    c->trials = req.trials;
  }
  for (std::size_t i = 0; i < ns; ++i) {
    if (req.run_gabp) res.gabp.ber.push_back(static_cast<double>(eg[i]) / bits);
    if (req.run_lmmse) res.lmmse.ber.push_back(static_cast<double>(el[i]) / bits);
  }
  return res;
}

double snr_at_ber(const BerCurve& c, double target) {
  for (std::size_t i = 0; i < c.ber.size(); ++i) {
    if (c.ber[i] > target) continue;
    if (i == 0) return c.snr_db[0];
    const double b0 = c.ber[i - 1], b1 = c.ber[i];
    if (b1 <= 0.0) {
      // no errors at this point: log interpolation is undefined, fall back to linear in BER
      const double f = (b0 - target) / (b0 - b1);
      return c.snr_db[i - 1] + f * (c.snr_db[i] - c.snr_db[i - 1]);
    }
    const double f = (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
    return c.snr_db[i - 1] + f * (c.snr_db[i] - c.snr_db[i - 1]);
  }
  return kNaN;
}

std::vector<SensePoint> sense_sweep(const SenseRequest& req) {
  const Waveform& wf = *req.wf;
  const Index S = wf.num_symbols(), M = wf.frame_length();
  std::mt19937_64 prng(req.seed);
  const CVecd pilot = qpsk_symbols(S, prng, 1.0);
  const SensingDictionary dict = build_dictionary(wf, pilot, req.grid, req.doppler_period);
  const CVecd s = wf.modulate(pilot);
  const double range_bin = delay_to_range(1.0, req.radio);
  const double vel_bin = std::abs(doppler_to_velocity(1.0, req.radio));
  const Index nk = static_cast<Index>(req.grid.delays.size());
  const double fmin = req.grid.dopplers.front(), fmax = req.grid.dopplers.back();

  std::vector<SensePoint> pts(req.snr_db.size());
  std::vector<RmseAccumulator> acc(req.snr_db.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].snr_db = req.snr_db[i];
  for (Index t = 0; t < req.trials; ++t) {
    std::mt19937_64 rng(trial_seed(req.seed, t));
    // distinct delay bins, continuous Doppler unless on-grid
    std::vector<Index> kidx(nk);
    std::iota(kidx.begin(), kidx.end(), Index{0});
    for (Index i = 0; i < req.num_targets; ++i) {
      std::uniform_int_distribution<Index> pick(i, nk - 1);
      std::swap(kidx[i], kidx[pick(rng)]);
    }
    std::vector<PathParams> paths;
    std::vector<TruthTarget> truth;
    std::uniform_real_distribution<double> uf(fmin, fmax);
    std::uniform_int_distribution<Index> ud(0, static_cast<Index>(req.grid.dopplers.size()) - 1);
    for (Index i = 0; i < req.num_targets; ++i) {
      PathParams p;
      p.ell = req.grid.delays[kidx[i]];
      p.f = req.off_grid ? uf(rng) : req.grid.dopplers[ud(rng)];
      p.h = complex_normal(rng, 1.0 / static_cast<double>(req.num_targets));
      paths.push_back(p);
      truth.push_back({delay_to_range(static_cast<double>(p.ell), req.radio), doppler_to_velocity(p.f, req.radio)});
    }
    const DDChannel ch(paths, M, wf.channel_c1(), req.doppler_period);
    const CVecd r0 = wf.observe_vec(ch.apply<double>(CMatd(s)));
    const CVecd wb = wf.observe_vec(complex_normal_vector(M, rng, 1.0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double s2 = 1.0 / std::pow(10.0, req.snr_db[i] / 10.0);
      PdaConfig cfg = req.pda;
      cfg.N0 = s2;
      cfg.num_targets = req.num_targets;
      const PdaResult est = pda_estimate(r0 + std::sqrt(s2) * wb, dict, cfg);
      if (!est.h_hat.allFinite()) throw degenerate_error("PDA produced non-finite estimates (trial " + std::to_string(t) + ")");
      auto targets = extract_targets(est, req.grid, req.num_targets, req.radio);
      acc[i].add(targets, truth, range_bin, vel_bin);
      pts[i].estimates.push_back(std::move(targets));
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].range_rmse = acc[i].range_rmse();
    pts[i].velocity_rmse = acc[i].velocity_rmse();
    pts[i].trials = req.trials;
  }
  return pts;
}

namespace {

namespace fs = std::filesystem;

std::vector<double> ccdf_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 320; ++i) t.push_back(0.05 * i);
  return t;
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

void write_filter(const fs::path& dir, const Waveform& wf, RunSummary& out) {
  const auto* m = dynamic_cast<const AfbmModem*>(&wf);
  if (!m) return;
  CsvWriter w(dir / "filter.csv", "m,g");
  for (Index i = 0; i < m->filter().length(); ++i) w.row(i, m->filter().g(i));
  out.files.push_back("filter.csv");
}

}  // namespace

RunSummary run(const ExperimentConfig& cfg_in) {
  ExperimentConfig c = cfg_in;
  finalize_config(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  RunSummary out;
  const auto wf = make_waveform(c, c.waveform);
  const Index S = wf->num_symbols();
  const double period = static_cast<double>(c.N);
  ChannelBudget budget{c.ell_max, c.f_max, c.xi, c.P};

  switch (c.experiment) {
    case Experiment::Papr: {
      std::vector<double> vals;
      vals.reserve(c.trials);
      for (Index t = 0; t < c.trials; ++t) {
        std::mt19937_64 rng(trial_seed(c.seed, t));
        vals.push_back(papr_db(interpolate(wf->modulate(qpsk_symbols(S, rng, c.Es)), c.oversample)));
      }
      const CCDF cc = papr_ccdf(vals, ccdf_thresholds());
      CsvWriter w(dir / "papr_ccdf.csv", "papr_db,prob");
      for (std::size_t i = 0; i < cc.thresholds_db.size(); ++i) w.row(cc.thresholds_db[i], cc.exceed_prob[i]);
      out.files.push_back("papr_ccdf.csv");
      out.values["papr_db_at_1e-3"] = ccdf_quantile(vals, 1e-3);
      break;
    }
    case Experiment::Psd: {
      const PSDProfile prof = psd_profile(*wf);
      {
        CsvWriter w(dir / "psd_profile.csv", "bin,power_db");
        for (std::size_t i = 0; i < prof.bins.size(); ++i) w.row(prof.bins[i], prof.power_db[i]);
      }
      CMatd frames(wf->frame_length(), c.trials);
      for (Index t = 0; t < c.trials; ++t) {
        std::mt19937_64 rng(trial_seed(c.seed, t));
        frames.col(t) = wf->modulate(qpsk_symbols(S, rng, c.Es));
      }
      const PSDProfile pg = periodogram(frames, 4 * next_pow2(wf->frame_length()));
      {
        CsvWriter w(dir / "psd_periodogram.csv", "bin,power_db");
        for (std::size_t i = 0; i < pg.bins.size(); ++i) w.row(pg.bins[i], pg.power_db[i]);
      }
      out.files.insert(out.files.end(), {"psd_profile.csv", "psd_periodogram.csv"});
      const double edge = 0.55 * static_cast<double>(c.P) / static_cast<double>(c.N);
      out.values["oob_edge"] = edge;
      out.values["oob_floor_db"] = oob_floor_db(pg, edge);
      write_filter(dir, *wf, out);
      break;
    }
    case Experiment::Af: {
      std::mt19937_64 rng(c.seed);
      const CVecd s = wf->modulate(qpsk_symbols(S, rng, c.Es));
      std::vector<double> dop;
      for (int i = -64; i <= 64; ++i) dop.push_back(0.125 * i);
      const AmbiguityCuts a = ambiguity(s, s.size() - 1, dop);
      {
        CsvWriter w(dir / "af_delay.csv", "lag,amp");
        for (std::size_t i = 0; i < a.lags.size(); ++i) w.row(a.lags[i], a.delay_cut[i]);
      }
      {
        CsvWriter w(dir / "af_doppler.csv", "doppler,amp");
        for (std::size_t i = 0; i < a.dopplers.size(); ++i) w.row(a.dopplers[i], a.doppler_cut[i]);
      }
      out.files.insert(out.files.end(), {"af_delay.csv", "af_doppler.csv"});
      out.values["delay_peak_sidelobe"] = peak_sidelobe(a.lags, a.delay_cut);
      break;
    }
    case Experiment::Ber: {
      BerRequest req;
      req.wf = wf.get();
      req.snr_db = c.snr_db;
      req.trials = c.trials;
      req.seed = c.seed;
      req.R = c.R;
      req.budget = budget;
      req.doppler_period = period;
      req.gabp.i_max = c.i_max;
      req.gabp.beta = c.beta;
      req.gabp.Es = c.Es;
      std::vector<double> trace;
      req.gabp_trace = &trace;
      const BerResult res = ber_sweep(req);
      for (auto [name, curve] : {std::pair{"gabp", &res.gabp}, std::pair{"lmmse", &res.lmmse}}) {
        const std::string fn = std::string("ber_") + name + ".csv";
        CsvWriter w(dir / fn, "snr_db,ber,trials");
        for (std::size_t i = 0; i < curve->snr_db.size(); ++i) w.row(curve->snr_db[i], curve->ber[i], curve->trials);
        out.files.push_back(fn);
        out.values[std::string("snr_at_1e-3_") + name] = snr_at_ber(*curve, 1e-3);
      }
      CsvWriter w(dir / "gabp_trace.csv", "iter,residual_mse");
      for (std::size_t i = 0; i < trace.size(); ++i) w.row(i + 1, trace[i]);
      out.files.push_back("gabp_trace.csv");
      if (c.export_channels) {
        CsvWriter wc(dir / "channels.csv", "trial,path,h_re,h_im,ell,f");
        for (Index t = 0; t < c.trials; ++t) {
          std::mt19937_64 rng(trial_seed(c.seed, t));
          const auto paths = random_paths(c.R, budget, rng);
          for (std::size_t p = 0; p < paths.size(); ++p) wc.row(t, p, paths[p].h.real(), paths[p].h.imag(), paths[p].ell, paths[p].f);
        }
        out.files.push_back("channels.csv");
      }
      break;
    }
    case Experiment::Sense: {
      SenseRequest req;
      req.wf = wf.get();
      req.snr_db = c.snr_db;
      req.trials = c.trials;
      req.seed = c.seed;
      req.num_targets = c.R;
      req.grid = make_grid(c.grid_delay, c.grid_doppler, c.ell_max, c.f_max);
      req.doppler_period = period;
      req.radio = Radio{c.fc, c.bandwidth, c.N};
      req.pda.i_max = c.pda_i_max;
      req.pda.beta = c.pda_beta;
      const auto pts = sense_sweep(req);
      {
        CsvWriter w(dir / "rmse.csv", "snr_db,range_rmse_m,velocity_rmse_mps,trials");
        for (const auto& p : pts) w.row(p.snr_db, p.range_rmse, p.velocity_rmse, p.trials);
      }
      out.files.push_back("rmse.csv");
      for (const auto& p : pts) {
        const std::string fn = "targets_snr" + fmt(p.snr_db) + ".csv";
        CsvWriter w(dir / fn, "trial,atom_k,atom_d,tau_s,range_m,nu_hz,velocity_mps,gain_re,gain_im,rho");
        for (std::size_t t = 0; t < p.estimates.size(); ++t)
          for (const auto& e : p.estimates[t])
            w.row(t, e.atom_k, e.atom_d, e.tau_s, e.range_m, e.nu_hz, e.velocity_mps, e.gain.real(), e.gain.imag(), e.rho);
        out.files.push_back(fn);
        out.values["range_rmse_snr" + fmt(p.snr_db)] = p.range_rmse;
        out.values["velocity_rmse_snr" + fmt(p.snr_db)] = p.velocity_rmse;
      }
      break;
    }
    case Experiment::Loopback: {
      CsvWriter w(dir / "loopback.csv", "trial,symbol_errors,ber");
      Index total = 0;
      for (Index t = 0; t < c.trials; ++t) {
        std::mt19937_64 rng(trial_seed(c.seed, t));
        const CVecd x = qpsk_symbols(S, rng, c.Es);
        const CVecd y = wf->tx_matrix().adjoint() * wf->modulate(x);
        Index se = 0;
        for (Index i = 0; i < S; ++i)
          se += (std::signbit(y(i).real()) != std::signbit(x(i).real())) || (std::signbit(y(i).imag()) != std::signbit(x(i).imag()));
        total += se;
        w.row(t, se, ber(y, x));
      }
      out.files.push_back("loopback.csv");
      out.values["symbol_errors"] = static_cast<double>(total);
      break;
    }
    case Experiment::Gram: {
      const auto* m = dynamic_cast<const AfbmModem*>(wf.get());
      CsvWriter w(dir / "gram.csv", m ? "trial,ftd_ratio,afb_ratio" : "trial,daf_ratio");
      for (Index t = 0; t < c.trials; ++t) {
        std::mt19937_64 rng(trial_seed(c.seed, t));
        const DDChannel ch(random_paths(c.R, budget, rng), wf->frame_length(), wf->channel_c1(), period);
        if (m) w.row(t, gram_diagonality(m->filtered_td_channel(ch)).ratio, gram_diagonality(m->afb_effective_channel(ch)).ratio);
        else w.row(t, gram_diagonality(wf->obs_channel(ch)).ratio);
      }
      out.files.push_back("gram.csv");
      break;
    }
  }

  std::ofstream man(dir / "manifest.txt");
  man << std::setprecision(17);
  const std::string cfg_text = c.serialize();
  man << "# afbm-sim run manifest\n"
      << "config_hash=" << std::hex << fnv1a(cfg_text) << std::dec << '\n'
      << "snr_definition=Es/sigma_n^2 per time-domain sample, transmit power Es per sample\n"
      << "trial_seed=master_seed xor trial\n";
  for (const auto& [k, v] : out.values) man << "result." << k << '=' << v << '\n';
  for (const auto& f : out.files) man << "file=" << f << '\n';
  man << "[config]\n" << cfg_text;
  return out;
}

}  // namespace afbm
