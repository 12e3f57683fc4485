#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jjq/cavity.hpp"
#include "jjq/models.hpp"

// Lumped-element circuit description. Default units: capacitance fF,
// inductance nH, energies GHz (E/h), voltage mV; bias and flux are dimensionless.
namespace jjq {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ElementKind {
  kCapacitor,      // cap NAME a b C
  kInductor,       // ind NAME a b L
  kJunction,       // jj NAME a b EJ [CJ]
  kSquid,          // squid NAME a b EJ1 EJ2 [CJ] [flux]
  kVoltageSource,  // vsrc NAME a b V [Cg]
  kCurrentBias,    // ibias NAME a b b
};

std::string keyword(ElementKind kind);

struct Element {
  ElementKind kind = ElementKind::kCapacitor;
  std::string name;
  std::string a;
  std::string b;
  std::map<std::string, double> params;  // canonical keys, defaults filled in
  SourcePos pos;                         // not part of equality

  double param(const std::string& key) const;
  bool connects(const std::string& x, const std::string& y) const {
    return (a == x && b == y) || (a == y && b == x);
  }
  // The endpoint that is not `node`.
  const std::string& other(const std::string& node) const { return a == node ? b : a; }
  bool operator==(const Element& o) const {
    return kind == o.kind && name == o.name && a == o.a && b == o.b && params == o.params;
  }
};

struct Loop {
  std::string name;
  std::vector<std::string> elements;
  double flux = 0.0;  // Phi_ext / Phi_0
  SourcePos pos;

  bool operator==(const Loop& o) const {
    return name == o.name && elements == o.elements && flux == o.flux;
  }
};

struct NodeDecl {
  std::string name;
  bool ground = false;
  SourcePos pos;

  bool operator==(const NodeDecl& o) const { return name == o.name && ground == o.ground; }
};

struct Netlist {
  std::vector<NodeDecl> nodes;  // declaration order
  std::vector<Element> elements;
  std::vector<Loop> loops;

  // Empty when no ground was declared (only legal for an element-free netlist).
  std::string ground() const;
  const Element* find(const std::string& name) const;
  bool operator==(const Netlist&) const = default;
};

// Throws ParseError with a 1-based line:column on syntax and semantic errors.
Netlist parse_netlist(std::string_view text);
// Throws IoError when the file cannot be read.
Netlist parse_netlist_file(const std::string& path);

// Canonical form: one statement per line, all parameters explicit in a fixed
// order, shortest round-trip numbers. parse_netlist(print_netlist(n)) == n.
std::string print_netlist(const Netlist& net);

std::string netlist_to_json(const Netlist& net);

enum class Template { kCpb, kFlux3jj, kPhase, kQubitPlusResonator };

std::string to_string(Template t);

struct QubitResonatorSpec {
  ChargeQubitSpec qubit;
  CavitySpec cavity;  // omega01 from the qubit spectrum, g from the coupling capacitor
  double coupling_cap_ff = 0.0;
};

using ExtractedSpec =
    std::variant<ChargeQubitSpec, FluxQubitSpec, PhaseQubitSpec, QubitResonatorSpec>;

struct RecognizedTopology {
  Template kind = Template::kCpb;
  ExtractedSpec spec;
  std::vector<std::string> diagnostics;  // one line per checked condition
};

// Templates are tried in the order CPB, FLUX3JJ, PHASE, QUBIT_PLUS_RESONATOR.
// Throws RecognitionError naming the closest template and its failing
// condition when none matches; DomainError when a match violates physics
// (e.g. bias b >= 1).
RecognizedTopology recognize(const Netlist& net);

}  // namespace jjq
