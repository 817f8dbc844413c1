#include "twc/wiring.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "twc/error.hpp"

namespace twc {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> tokens;
  std::istringstream is{std::string(line)};
  for (std::string t; is >> t;) tokens.push_back(std::move(t));
  return tokens;
}

bool valid_name(std::string_view name) {
  return !name.empty() && std::ranges::all_of(name, [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

void expect_arity(const std::vector<std::string>& tokens, std::size_t n, int line, const char* usage) {
  if (tokens.size() != n) throw WiringError(line, std::string("malformed line, expected '") + usage + "'");
}

std::string checked_name(const std::string& name, int line) {
  if (!valid_name(name)) throw WiringError(line, "invalid neuron name '" + name + "'");
  return name;
}

}  // namespace

bool operator==(const WiringDocument& x, const WiringDocument& y) {
  auto neuron_eq = [](const auto& a, const auto& b) { return a.name == b.name && a.role == b.role; };
  auto chem_eq = [](const auto& a, const auto& b) {
    return a.pre == b.pre && a.post == b.post && a.polarity == b.polarity;
  };
  auto gap_eq = [](const auto& a, const auto& b) { return a.a == b.a && a.b == b.b; };
  return std::ranges::equal(x.neurons, y.neurons, neuron_eq) &&
         std::ranges::equal(x.chemical, y.chemical, chem_eq) && std::ranges::equal(x.gaps, y.gaps, gap_eq);
}

WiringDocument parse_wiring_document(std::string_view text) {
  WiringDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;

    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& kind = tokens[0];
    if (kind == "neuron") {
      expect_arity(tokens, 3, line_no, "neuron <NAME> <sensory|inter|motor>");
      const auto role = parse_role(tokens[2]);
      if (!role) throw WiringError(line_no, "unknown neuron role '" + tokens[2] + "'");
      doc.neurons.push_back({checked_name(tokens[1], line_no), *role, line_no});
    } else if (kind == "chem") {
      expect_arity(tokens, 4, line_no, "chem <PRE> <POST> <exc|inh>");
      const auto polarity = parse_polarity(tokens[3]);
      if (!polarity) throw WiringError(line_no, "unknown synapse polarity '" + tokens[3] + "'");
      doc.chemical.push_back({checked_name(tokens[1], line_no), checked_name(tokens[2], line_no), *polarity, line_no});
    } else if (kind == "gap") {
      expect_arity(tokens, 3, line_no, "gap <A> <B>");
      doc.gaps.push_back({checked_name(tokens[1], line_no), checked_name(tokens[2], line_no), line_no});
    } else {
      throw WiringError(line_no, "unknown declaration '" + kind + "'");
    }
  }
  return doc;
}

Topology build_topology(const WiringDocument& doc) {
  std::map<std::string, int, std::less<>> ids;
  std::vector<Neuron> neurons;
  for (const auto& n : doc.neurons) {
    if (!ids.emplace(n.name, static_cast<int>(neurons.size())).second)
      throw WiringError(n.line, "duplicate neuron name '" + n.name + "'");
    neurons.push_back({n.name, n.role});
  }
  auto resolve = [&ids](const std::string& name, int line) {
    const auto it = ids.find(name);
    if (it == ids.end()) throw WiringError(line, "undeclared neuron '" + name + "'");
    return it->second;
  };

  std::vector<ChemicalSynapse> chemical;
  for (const auto& c : doc.chemical) {
    const int pre = resolve(c.pre, c.line);
    const int post = resolve(c.post, c.line);
    if (pre == post) throw WiringError(c.line, "chemical synapse from '" + c.pre + "' onto itself");
    if (neurons[static_cast<std::size_t>(post)].role == NeuronRole::kSensory)
      throw WiringError(c.line, "chemical synapse targets sensory neuron '" + c.post + "'");
    if (neurons[static_cast<std::size_t>(pre)].role == NeuronRole::kMotor)
      throw WiringError(c.line, "chemical synapse leaves motor neuron '" + c.pre + "'");
    chemical.push_back({pre, post, c.polarity});
  }
  std::vector<GapJunction> gaps;
  for (const auto& g : doc.gaps) {
    const int a = resolve(g.a, g.line);
    const int b = resolve(g.b, g.line);
    if (a == b) throw WiringError(g.line, "gap junction from '" + g.a + "' onto itself");
    for (int id : {a, b})
      if (neurons[static_cast<std::size_t>(id)].role == NeuronRole::kSensory)
        throw WiringError(g.line, "gap junction touches sensory neuron '" + neurons[static_cast<std::size_t>(id)].name + "'");
    gaps.push_back({a, b});
  }
  return Topology(std::move(neurons), std::move(chemical), std::move(gaps));
}

Topology parse_wiring(std::string_view text) { return build_topology(parse_wiring_document(text)); }

Topology load_wiring(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open wiring file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_wiring(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

WiringDocument to_document(const Topology& topo) {
  WiringDocument doc;
  for (const auto& n : topo.neurons()) doc.neurons.push_back({n.name, n.role, 0});
  for (const auto& c : topo.chemical())
    doc.chemical.push_back({topo.neuron(c.pre).name, topo.neuron(c.post).name, c.polarity, 0});
  for (const auto& g : topo.gaps()) doc.gaps.push_back({topo.neuron(g.a).name, topo.neuron(g.b).name, 0});
  return doc;
}

std::string serialize_wiring(const WiringDocument& doc) {
  std::ostringstream os;
  for (const auto& n : doc.neurons) os << "neuron " << n.name << ' ' << to_string(n.role) << '\n';
  for (const auto& c : doc.chemical) os << "chem " << c.pre << ' ' << c.post << ' ' << to_string(c.polarity) << '\n';
  for (const auto& g : doc.gaps) os << "gap " << g.a << ' ' << g.b << '\n';
  return os.str();
}

std::string serialize_wiring(const Topology& topo) { return serialize_wiring(to_document(topo)); }

}  // namespace twc
