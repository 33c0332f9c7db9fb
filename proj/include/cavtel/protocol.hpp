#pragma once
// Protocol orchestration: the closed-form outcome distribution and the
// quantum-jump trajectory engine for the full three-stage sequence
// (Alice's mapping pulse, Bob's resource pulse, detection window).

#include <vector>

#include "cavtel/analytic.hpp"
#include "cavtel/qdyn.hpp"
#include "cavtel/rng.hpp"

namespace cavtel::protocol {

using analytic::DetectorKind;
using analytic::InputQubit;
using analytic::ProtocolMode;
using analytic::PulseSchedule;
using analytic::SystemParams;

struct DetectorModel {
  DetectorKind kind = DetectorKind::Conventional;
  double eta = 1.0;           // detection efficiency
  double dark_rate_hz = 0.0;  // dark counts per second per detector
  void validate() const;
};

enum class Classification { Success, ContaminatedSuccess, NoClick, DoubleClick };

struct Click {
  double t = 0.0;     // absolute time from the start of Alice's pulse (us)
  int detector = 0;   // +1 -> D+, -1 -> D-
  bool dark = false;
};

// Record classification.  Any click before t_a aborts the run (NoClick,
// or DoubleClick when the record holds a second click).  Inside the
// detection window conventional detectors are binary, so repeated hits
// on one detector merge into a single click, while photon-number
// resolving detectors reject any multi-click record.  A single surviving
// click indicates success; it is contaminated when the run emitted two
// cavity photons.
Classification classify(const std::vector<Click>& clicks, double t_a,
                        DetectorKind kind, int n_emissions, int* epsilon_out);

struct RunOutcome {
  Classification cls = Classification::NoClick;
  int epsilon = 0;        // detector sign, success-type outcomes only
  double fidelity = 0.0;  // corrected fidelity, success-type outcomes only
  bool bob_ground = false;  // Bob's atom left in |0> (population > 1-1e-6)
  int n_emissions = 0;    // cavity emissions, detected or not
  int n_spont = 0;        // spontaneous-emission jumps (full model)
  std::vector<Click> clicks;  // time-ordered detected events
};

// Exact outcome distribution of the adiabatic model with gamma = 0, no
// dark counts and t_d -> infinity.  Requires the mapping condition
// b(t_a) = 0 of the closed-form bookkeeping.
struct BranchProbs {
  double success_plus = 0.0;
  double success_minus = 0.0;
  double contaminated = 0.0;
  double no_click = 0.0;
  double double_click = 0.0;
  double fidelity_success = 1.0;       // coherent one-click branch
  double fidelity_contaminated = 0.0;  // two-emission branch, |alpha|^2
  double indicated() const {
    return success_plus + success_minus + contaminated;
  }
  double average_fidelity() const;  // over the indicated-success branches
};
BranchProbs run_analytic(const SystemParams& p, const PulseSchedule& s,
                         const InputQubit& q, const DetectorModel& det);

// Reusable trajectory sampler: stage Hamiltonians are diagonalized once
// and shared by every run; run() is const and safe to call concurrently.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const SystemParams& p, const PulseSchedule& s,
                   const DetectorModel& det, qdyn::Model model, int n_max = 1);

  RunOutcome run(const InputQubit& q, RngStream& rng) const;

  const SystemParams& params() const { return params_; }
  const PulseSchedule& schedule() const { return schedule_; }
  const DetectorModel& detector() const { return detector_; }
  qdyn::Model model() const { return model_; }
  int n_max() const { return n_max_; }

 private:
  SystemParams params_;
  PulseSchedule schedule_;
  DetectorModel detector_;
  qdyn::Model model_;
  int n_max_;
  std::vector<qdyn::CollapseChannel> channels_;
  struct Stage {
    double duration;
    Propagator prop;
  };
  std::vector<Stage> stages_;
};

// One-shot convenience wrapper.
RunOutcome run_trajectory(const SystemParams& p, const PulseSchedule& s,
                          const InputQubit& q, const DetectorModel& det,
                          qdyn::Model model, RngStream& rng, int n_max = 1);

}  // namespace cavtel::protocol
