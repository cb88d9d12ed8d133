#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "afbm/afbm_modem.hpp"
#include "afbm/gabp_detector.hpp"
#include "afbm/metrics.hpp"
#include "afbm/pda_sensing.hpp"

namespace afbm {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Experiment { Papr, Psd, Af, Ber, Sense, Loopback, Gram };
enum class WaveformKind { AfbmPhydyas, AfbmHermite, Afdm };

std::string to_string(Experiment e);
std::string to_string(WaveformKind w);
Experiment parse_experiment(const std::string& s);
WaveformKind parse_waveform(const std::string& s);

struct ExperimentConfig {
  Experiment experiment = Experiment::Papr;
  WaveformKind waveform = WaveformKind::AfbmPhydyas;
  Index L = 128, N = 256, P = 256, K = 8;
  // chirp overrides; NaN keeps the experiment's preset
  double c1_L, c2_L, c1_P, c2_P, c1_N, c2_N;
  Index R = 3, ell_max = 16, xi = 1;
  double f_max = 2.0;
  double fc = 4e9, bandwidth = 1e6, Es = 1.0;
  int i_max = 20;
  double beta = 0.5;
  int pda_i_max = 30;
  double pda_beta = 0.7;
  Index grid_delay = 8, grid_doppler = 8;
  std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  Index trials = 1000;
  std::uint64_t seed = 1;
  Index oversample = 1;
  bool large = false;
  bool export_channels = false;
  std::string out = "results";
  std::set<std::string> explicit_keys;  // keys set by file or flag

  ExperimentConfig();
  // lossless key=value text
  std::string serialize() const;
};

// known keys, in serialisation order
const std::vector<std::string>& config_keys();
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
void apply_config_text(ExperimentConfig& c, const std::string& text);
ExperimentConfig parse_config_text(const std::string& text);
// fills desk-scale defaults for unset keys, checks constraints; throws config_error
void finalize_config(ExperimentConfig& c);

WaveformParams afbm_params(const ExperimentConfig& c, FilterKind f);
std::unique_ptr<Waveform> make_waveform(const ExperimentConfig& c, WaveformKind w);
// AFDM with the same data frame length in time as the AFBM configuration
AfdmParams afdm_params(const ExperimentConfig& c);

struct RunSummary {
  std::vector<std::string> files;
  std::map<std::string, double> values;  // headline numbers, also written to the manifest
};

// executes the experiment, writes CSVs plus manifest.txt into c.out
RunSummary run(const ExperimentConfig& c);

// shared Monte-Carlo kernels, also used by the acceptance suite
struct BerCurve {
  std::vector<double> snr_db;
  std::vector<double> ber;
  Index trials = 0;
};

struct BerRequest {
  const Waveform* wf = nullptr;
  std::vector<double> snr_db;
  Index trials = 0;
  std::uint64_t seed = 1;
  Index R = 3;
  ChannelBudget budget;
  double doppler_period = 0.0;
  GabpConfig gabp;
  bool run_gabp = true;
  bool run_lmmse = true;
  std::vector<double>* gabp_trace = nullptr;  // residual trace of trial 0 at the last SNR, replaced on each sweep
};

struct BerResult {
  BerCurve gabp, lmmse;
};

BerResult ber_sweep(const BerRequest& req);

// SNR at which a BER curve crosses the target (log-linear interpolation); NaN if it never does
double snr_at_ber(const BerCurve& c, double target);

struct SenseRequest {
  const Waveform* wf = nullptr;
  std::vector<double> snr_db;
  Index trials = 0;
  std::uint64_t seed = 1;
  Index num_targets = 3;
  DelayDopplerGrid grid;
  double doppler_period = 0.0;
  Radio radio;
  PdaConfig pda;
  bool off_grid = true;
};

struct SensePoint {
  double snr_db = 0.0;
  double range_rmse = 0.0;
  double velocity_rmse = 0.0;
  Index trials = 0;
  std::vector<std::vector<Target>> estimates;  // per trial
};

std::vector<SensePoint> sense_sweep(const SenseRequest& req);

std::uint64_t trial_seed(std::uint64_t master, Index trial);
std::uint64_t fnv1a(const std::string& s);

}  // namespace afbm
