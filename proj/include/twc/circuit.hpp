#pragma once

// Neuron, chemical synapse, and gap-junction models of a wired leaky
// integrator circuit.
//
// Potentials are in volts, conductances in siemens, capacitances in farads,
// currents in amperes. The synaptic sigmoid is evaluated on millivolt-scaled
// potentials: exponent = -sigma * (V_pre[mV] - mu[mV]), so sigma in [0.05, 0.5]
// is a per-millivolt steepness.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace twc {

enum class NeuronRole { kSensory, kInter, kMotor };
enum class Polarity { kExcitatory, kInhibitory };

// Direction of the activation sigmoid. kIncreasing opens the synapse as the
// presynaptic neuron depolarizes; kDecreasing uses the opposite sign in the
// exponent and closes it instead.
enum class SigmoidSign { kIncreasing, kDecreasing };

inline constexpr double kSigmoidMidpoint = -0.040;       // mu, volts
inline constexpr double kExcitatoryReversal = 0.0;       // volts
inline constexpr double kInhibitoryReversal = -0.090;    // volts

// Sanity envelope for free (non-clamped) potentials.
inline constexpr double kEnvelopeLow = -0.110;
inline constexpr double kEnvelopeHigh = 0.020;

constexpr double reversal_potential(Polarity p) {
  return p == Polarity::kExcitatory ? kExcitatoryReversal : kInhibitoryReversal;
}

std::string_view to_string(NeuronRole role);
std::optional<NeuronRole> parse_role(std::string_view text);
std::string_view to_string(Polarity polarity);
std::optional<Polarity> parse_polarity(std::string_view text);
std::string_view to_string(SigmoidSign sign);
std::optional<SigmoidSign> parse_sigmoid_sign(std::string_view text);

template <typename Scalar>
struct NeuronParams {
  Scalar capacitance;       // C_m
  Scalar leak_conductance;  // G_Leak
  Scalar leak_potential;    // V_Leak
};

template <typename Scalar>
struct SynapseParams {
  Scalar weight;  // maximum conductance w
  Scalar sigma;   // per-millivolt steepness
  Polarity polarity = Polarity::kExcitatory;
};

template <typename Scalar>
Scalar chemical_conductance(Scalar v_pre, const SynapseParams<Scalar>& syn,
                            SigmoidSign sign = SigmoidSign::kIncreasing) {
  using std::exp;
  const Scalar offset_mv = (v_pre - Scalar(kSigmoidMidpoint)) * Scalar(1000);
  const Scalar exponent = sign == SigmoidSign::kIncreasing ? -syn.sigma * offset_mv
                                                           : syn.sigma * offset_mv;
  return syn.weight / (Scalar(1) + exp(exponent));
}

template <typename Scalar>
Scalar chemical_current(Scalar v_pre, Scalar v_post, const SynapseParams<Scalar>& syn,
                        SigmoidSign sign = SigmoidSign::kIncreasing) {
  return chemical_conductance(v_pre, syn, sign) *
         (Scalar(reversal_potential(syn.polarity)) - v_post);
}

// Ohmic current into the neuron at v_self through a junction of conductance w_hat.
template <typename Scalar>
Scalar gap_current(Scalar v_self, Scalar v_other, Scalar w_hat) {
  return w_hat * (v_other - v_self);
}

template <typename Scalar>
Scalar leak_current(Scalar v, const NeuronParams<Scalar>& n) {
  return n.leak_conductance * (n.leak_potential - v);
}

struct Neuron {
  std::string name;
  NeuronRole role;
};

struct ChemicalSynapse {
  int pre;
  int post;
  Polarity polarity;
};

struct GapJunction {
  int a;
  int b;
};

// Immutable, validated wiring of a circuit.
class Topology {
 public:
  // Throws ConfigError on any violated wiring invariant.
  Topology(std::vector<Neuron> neurons, std::vector<ChemicalSynapse> chemical,
           std::vector<GapJunction> gaps);

  std::span<const Neuron> neurons() const { return neurons_; }
  std::span<const ChemicalSynapse> chemical() const { return chemical_; }
  std::span<const GapJunction> gaps() const { return gaps_; }
  std::size_t size() const { return neurons_.size(); }

  const Neuron& neuron(int id) const { return neurons_.at(static_cast<std::size_t>(id)); }
  bool is_sensory(int id) const { return neuron(id).role == NeuronRole::kSensory; }
  std::optional<int> find(std::string_view name) const;
  // Like find() but throws ConfigError for unknown names.
  int index_of(std::string_view name) const;
  std::vector<int> sensory_neurons() const;

  friend bool operator==(const Topology&, const Topology&);

 private:
  std::vector<Neuron> neurons_;
  std::vector<ChemicalSynapse> chemical_;
  std::vector<GapJunction> gaps_;
};

// Unflattened parameter set for one topology.
struct CircuitParameters {
  std::vector<NeuronParams<double>> neurons;
  std::vector<SynapseParams<double>> synapses;  // polarity mirrors the topology
  std::vector<double> gaps;
};

// Topology + parameters with per-neuron incidence lists, ready to integrate.
class CircuitModel {
 public:
  CircuitModel(Topology topology, CircuitParameters params,
               SigmoidSign sign = SigmoidSign::kIncreasing);

  const Topology& topology() const { return topology_; }
  const CircuitParameters& params() const { return params_; }
  SigmoidSign sigmoid_sign() const { return sign_; }

  struct Incoming {
    int pre;
    int synapse;
  };
  struct Coupled {
    int other;
    int junction;
  };
  std::span<const Incoming> incoming(int id) const { return incoming_[static_cast<std::size_t>(id)]; }
  std::span<const Coupled> coupled(int id) const { return coupled_[static_cast<std::size_t>(id)]; }

 private:
  Topology topology_;
  CircuitParameters params_;
  SigmoidSign sign_;
  std::vector<std::vector<Incoming>> incoming_;
  std::vector<std::vector<Coupled>> coupled_;
};

// dv_i/dt in volts per second. Throws ConfigError for sensory (clamped) neurons.
double membrane_derivative(int neuron, const Eigen::VectorXd& v, const CircuitModel& model);

}  // namespace twc
