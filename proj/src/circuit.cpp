#include "twc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "twc/error.hpp"

namespace twc {

std::string_view to_string(NeuronRole role) {
  switch (role) {
    case NeuronRole::kSensory: return "sensory";
    case NeuronRole::kInter: return "inter";
    case NeuronRole::kMotor: return "motor";
  }
  return "?";
}

std::optional<NeuronRole> parse_role(std::string_view text) {
  if (text == "sensory") return NeuronRole::kSensory;
  if (text == "inter") return NeuronRole::kInter;
  if (text == "motor") return NeuronRole::kMotor;
  return std::nullopt;
}

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::kExcitatory ? "exc" : "inh";
}

std::optional<Polarity> parse_polarity(std::string_view text) {
  if (text == "exc") return Polarity::kExcitatory;
  if (text == "inh") return Polarity::kInhibitory;
  return std::nullopt;
}

std::string_view to_string(SigmoidSign sign) {
  return sign == SigmoidSign::kIncreasing ? "increasing" : "decreasing";
}

std::optional<SigmoidSign> parse_sigmoid_sign(std::string_view text) {
  if (text == "increasing") return SigmoidSign::kIncreasing;
  if (text == "decreasing") return SigmoidSign::kDecreasing;
  return std::nullopt;
}

Topology::Topology(std::vector<Neuron> neurons, std::vector<ChemicalSynapse> chemical,
                   std::vector<GapJunction> gaps)
    : neurons_(std::move(neurons)), chemical_(std::move(chemical)), gaps_(std::move(gaps)) {
  std::set<std::string_view> names;
  for (const auto& n : neurons_) {
    if (n.name.empty()) throw ConfigError("neuron with empty name");
    if (!names.insert(n.name).second) throw ConfigError("duplicate neuron name '" + n.name + "'");
  }
  const int count = static_cast<int>(neurons_.size());
  auto check_id = [count](int id) {
    if (id < 0 || id >= count) throw ConfigError("synapse endpoint " + std::to_string(id) + " is not a declared neuron");
  };
  for (const auto& s : chemical_) {
    check_id(s.pre);
    check_id(s.post);
    if (s.pre == s.post) throw ConfigError("chemical synapse from '" + neuron(s.pre).name + "' onto itself");
    if (neuron(s.post).role == NeuronRole::kSensory)
      throw ConfigError("chemical synapse targets sensory neuron '" + neuron(s.post).name + "'");
    if (neuron(s.pre).role == NeuronRole::kMotor)
      throw ConfigError("chemical synapse leaves motor neuron '" + neuron(s.pre).name + "'");
  }
  for (const auto& g : gaps_) {
    check_id(g.a);
    check_id(g.b);
    if (g.a == g.b) throw ConfigError("gap junction from '" + neuron(g.a).name + "' onto itself");
    if (is_sensory(g.a) || is_sensory(g.b))
      throw ConfigError("gap junction touches sensory neuron '" +
                        neuron(is_sensory(g.a) ? g.a : g.b).name + "'");
  }
}

std::optional<int> Topology::find(std::string_view name) const {
  const auto it = std::find_if(neurons_.begin(), neurons_.end(),
                               [&](const Neuron& n) { return n.name == name; });
  if (it == neurons_.end()) return std::nullopt;
  return static_cast<int>(it - neurons_.begin());
}

int Topology::index_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw ConfigError("unknown neuron '" + std::string(name) + "'");
}

std::vector<int> Topology::sensory_neurons() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(neurons_.size()); ++i)
    if (is_sensory(i)) out.push_back(i);
  return out;
}

bool operator==(const Topology& a, const Topology& b) {
  auto neuron_eq = [](const Neuron& x, const Neuron& y) { return x.name == y.name && x.role == y.role; };
  auto chem_eq = [](const ChemicalSynapse& x, const ChemicalSynapse& y) {
    return x.pre == y.pre && x.post == y.post && x.polarity == y.polarity;
  };
  auto gap_eq = [](const GapJunction& x, const GapJunction& y) { return x.a == y.a && x.b == y.b; };
  return std::ranges::equal(a.neurons_, b.neurons_, neuron_eq) &&
         std::ranges::equal(a.chemical_, b.chemical_, chem_eq) &&
         std::ranges::equal(a.gaps_, b.gaps_, gap_eq);
}

CircuitModel::CircuitModel(Topology topology, CircuitParameters params, SigmoidSign sign)
    : topology_(std::move(topology)), params_(std::move(params)), sign_(sign) {
  const auto n = topology_.size();
  if (params_.neurons.size() != n || params_.synapses.size() != topology_.chemical().size() ||
      params_.gaps.size() != topology_.gaps().size())
    throw ConfigError("parameter set does not match the topology");
  incoming_.resize(n);
  coupled_.resize(n);
  const auto chem = topology_.chemical();
  for (int s = 0; s < static_cast<int>(chem.size()); ++s) {
    params_.synapses[static_cast<std::size_t>(s)].polarity = chem[static_cast<std::size_t>(s)].polarity;
    incoming_[static_cast<std::size_t>(chem[static_cast<std::size_t>(s)].post)].push_back(
        {chem[static_cast<std::size_t>(s)].pre, s});
  }
  const auto gaps = topology_.gaps();
  for (int g = 0; g < static_cast<int>(gaps.size()); ++g) {
    const auto& j = gaps[static_cast<std::size_t>(g)];
    coupled_[static_cast<std::size_t>(j.a)].push_back({j.b, g});
    coupled_[static_cast<std::size_t>(j.b)].push_back({j.a, g});
  }
}

double membrane_derivative(int neuron, const Eigen::VectorXd& v, const CircuitModel& model) {
  if (model.topology().is_sensory(neuron))
    throw ConfigError("sensory neuron '" + model.topology().neuron(neuron).name +
                      "' is clamped and has no intrinsic dynamics");
  const auto& p = model.params();
  const auto& cell = p.neurons[static_cast<std::size_t>(neuron)];
  const double v_self = v(neuron);
  double current = leak_current(v_self, cell);
  for (const auto& in : model.incoming(neuron))
    current += chemical_current(v(in.pre), v_self, p.synapses[static_cast<std::size_t>(in.synapse)],
                                model.sigmoid_sign());
  for (const auto& c : model.coupled(neuron))
    current += gap_current(v_self, v(c.other), p.gaps[static_cast<std::size_t>(c.junction)]);
  return current / cell.capacitance;
}

}  // namespace twc
