#include "twc/parameters.hpp"

#include "twc/error.hpp"

namespace twc {

namespace {

Eigen::Index synapse_offset(const Topology& topo) {
  return kNeuronStride * static_cast<Eigen::Index>(topo.size());
}

Eigen::Index gap_offset(const Topology& topo) {
  return synapse_offset(topo) + kSynapseStride * static_cast<Eigen::Index>(topo.chemical().size());
}

}  // namespace

bool ParameterBounds::contains(const Eigen::VectorXd& theta) const {
  return theta.size() == lower.size() && (theta.array() >= lower.array()).all() &&
         (theta.array() <= upper.array()).all();
}

Eigen::VectorXd ParameterBounds::clip(const Eigen::VectorXd& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

Eigen::Index parameter_count(const Topology& topo) {
  return gap_offset(topo) + static_cast<Eigen::Index>(topo.gaps().size());
}

ParameterBounds parameter_bounds(const Topology& topo) {
  const Eigen::Index n = parameter_count(topo);
  ParameterBounds b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  auto set = [&b](Eigen::Index i, Range r) {
    b.lower(i) = r.lo;
    b.upper(i) = r.hi;
  };
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(topo.size()); ++i) {
    set(kNeuronStride * i + 0, bounds::kCapacitance);
    set(kNeuronStride * i + 1, bounds::kLeakConductance);
    set(kNeuronStride * i + 2, bounds::kLeakPotential);
  }
  const Eigen::Index so = synapse_offset(topo);
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(topo.chemical().size()); ++s) {
    set(so + kSynapseStride * s + 0, bounds::kWeight);
    set(so + kSynapseStride * s + 1, bounds::kSigma);
  }
  const Eigen::Index go = gap_offset(topo);
  for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(topo.gaps().size()); ++g)
    set(go + g, bounds::kGapWeight);
  return b;
}

std::string parameter_name(const Topology& topo, Eigen::Index index) {
  if (index < 0 || index >= parameter_count(topo)) throw ConfigError("parameter index out of range");
  const Eigen::Index so = synapse_offset(topo);
  const Eigen::Index go = gap_offset(topo);
  if (index < so) {
    static constexpr const char* kFields[] = {"C_m", "G_Leak", "V_Leak"};
    return topo.neuron(static_cast<int>(index / kNeuronStride)).name + "." + kFields[index % kNeuronStride];
  }
  if (index < go) {
    const auto s = (index - so) / kSynapseStride;
    const auto& syn = topo.chemical()[static_cast<std::size_t>(s)];
    return topo.neuron(syn.pre).name + "->" + topo.neuron(syn.post).name +
           ((index - so) % kSynapseStride == 0 ? ".w" : ".sigma");
  }
  const auto& gap = topo.gaps()[static_cast<std::size_t>(index - go)];
  return topo.neuron(gap.a).name + "=" + topo.neuron(gap.b).name + ".w_hat";
}

Eigen::VectorXd flatten(const CircuitParameters& params) {
  const auto nn = static_cast<Eigen::Index>(params.neurons.size());
  const auto ns = static_cast<Eigen::Index>(params.synapses.size());
  const auto ng = static_cast<Eigen::Index>(params.gaps.size());
  Eigen::VectorXd theta(kNeuronStride * nn + kSynapseStride * ns + ng);
  Eigen::Index k = 0;
  for (const auto& n : params.neurons) {
    theta(k++) = n.capacitance;
    theta(k++) = n.leak_conductance;
    theta(k++) = n.leak_potential;
  }
  for (const auto& s : params.synapses) {
    theta(k++) = s.weight;
    theta(k++) = s.sigma;
  }
  for (double g : params.gaps) theta(k++) = g;
  return theta;
}

CircuitParameters unflatten(const Eigen::VectorXd& theta, const Topology& topo) {
  if (theta.size() != parameter_count(topo))
    throw ConfigError("parameter vector has " + std::to_string(theta.size()) + " components, topology needs " +
                      std::to_string(parameter_count(topo)));
  CircuitParameters p;
  Eigen::Index k = 0;
  p.neurons.reserve(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    p.neurons.push_back({theta(k), theta(k + 1), theta(k + 2)});
    k += kNeuronStride;
  }
  for (const auto& syn : topo.chemical()) {
    p.synapses.push_back({theta(k), theta(k + 1), syn.polarity});
    k += kSynapseStride;
  }
  for (std::size_t g = 0; g < topo.gaps().size(); ++g) p.gaps.push_back(theta(k++));
  return p;
}

Eigen::VectorXd uniform_parameters(const ParameterBounds& b, Rng& rng) {
  Eigen::VectorXd theta(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) theta(i) = rng.uniform(b.lower(i), b.upper(i));
  return theta;
}

Eigen::VectorXd midrange_parameters(const ParameterBounds& b) { return 0.5 * (b.lower + b.upper); }

Eigen::VectorXd silent_parameters(const Topology& topo) {
  Eigen::VectorXd theta = midrange_parameters(parameter_bounds(topo));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(topo.size()); ++i)
    theta(kNeuronStride * i + 2) = -0.070;
  const Eigen::Index so = synapse_offset(topo);
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(topo.chemical().size()); ++s)
    theta(so + kSynapseStride * s) = 0.0;
  theta.tail(static_cast<Eigen::Index>(topo.gaps().size())).setZero();
  return theta;
}

}  // namespace twc
