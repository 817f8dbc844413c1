#pragma once

// Line-oriented circuit description format.
//
//   # comment (also allowed after the last token of a line)
//   neuron <NAME> <sensory|inter|motor>
//   chem   <PRE> <POST> <exc|inh>
//   gap    <A> <B>
//
// Names match [A-Za-z0-9_]+. Neurons may be declared after the synapses that
// reference them; ids follow neuron declaration order.

#include <string>
#include <string_view>
#include <vector>

#include "twc/circuit.hpp"

namespace twc {

struct WiringDocument {
  struct NeuronDecl {
    std::string name;
    NeuronRole role;
    int line = 0;
  };
  struct ChemDecl {
    std::string pre;
    std::string post;
    Polarity polarity;
    int line = 0;
  };
  struct GapDecl {
    std::string a;
    std::string b;
    int line = 0;
  };

  std::vector<NeuronDecl> neurons;
  std::vector<ChemDecl> chemical;
  std::vector<GapDecl> gaps;

  // Compares declarations only; source lines are ignored.
  friend bool operator==(const WiringDocument& x, const WiringDocument& y);
};

// Syntax-level parse. Throws WiringError with the offending line.
WiringDocument parse_wiring_document(std::string_view text);

// Resolves names and enforces topology invariants, reporting the line of the
// offending declaration.
Topology build_topology(const WiringDocument& doc);

Topology parse_wiring(std::string_view text);
Topology load_wiring(const std::string& path);

std::string serialize_wiring(const WiringDocument& doc);
std::string serialize_wiring(const Topology& topo);
WiringDocument to_document(const Topology& topo);

}  // namespace twc
