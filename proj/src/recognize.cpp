#include <algorithm>
#include <cmath>
#include <set>

#include "jjq/constants.hpp"
#include "jjq/error.hpp"
#include "jjq/netlist.hpp"
#include "jjq/spectral.hpp"

namespace jjq {

namespace {

using ElementSet = std::set<const Element*>;

// Records pass/fail of each template condition; stops counting at the first failure.
class Checker {
 public:
  explicit Checker(Template t) : name_(to_string(t)) {}

  bool check(bool ok, const std::string& condition) {
    if (failed_) return false;
    trace_.push_back(name_ + ": " + (ok ? "ok   " : "FAIL ") + condition);
    if (ok) {
      ++score_;
    } else {
      failed_ = true;
      failure_ = condition;
    }
    return ok;
  }

  bool failed() const { return failed_; }
  int score() const { return score_; }
  const std::string& failure() const { return failure_; }
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::string name_;
  std::vector<std::string> trace_;
  std::string failure_;
  int score_ = 0;
  bool failed_ = false;
};

struct Attempt {
  Template kind;
  std::optional<ExtractedSpec> spec;
  Checker checker;
};

bool is_junction(const Element& e) {
  return e.kind == ElementKind::kJunction || e.kind == ElementKind::kSquid;
}

std::vector<const Element*> of_kind(const Netlist& net, ElementKind kind) {
  std::vector<const Element*> out;
  for (const auto& e : net.elements) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

std::vector<const Element*> junctions(const Netlist& net) {
  std::vector<const Element*> out;
  for (const auto& e : net.elements) {
    if (is_junction(e)) out.push_back(&e);
  }
  return out;
}

double junction_ej(const Element& e) {
  if (e.kind == ElementKind::kJunction) return e.param("EJ");
  return effective_josephson_energy({e.param("EJ1"), e.param("EJ2"), e.param("flux")}).magnitude;
}

// Names of elements that are not in `used`, or "" when all are.
std::string leftovers(const Netlist& net, const ElementSet& used) {
  std::string out;
  for (const auto& e : net.elements) {
    if (!used.count(&e)) out += (out.empty() ? "" : ", ") + e.name;
  }
  return out;
}

std::string unused_nodes(const Netlist& net, const ElementSet& used) {
  std::set<std::string> touched;
  for (const Element* e : used) {
    touched.insert(e->a);
    touched.insert(e->b);
  }
  std::string out;
  for (const auto& n : net.nodes) {
    if (!touched.count(n.name)) out += (out.empty() ? "" : ", ") + n.name;
  }
  return out;
}

int charge_cutoff(double ej, double ec) {
  return std::max(kDefaultChargeCutoff, static_cast<int>(std::ceil(4.0 * std::sqrt(ej / ec) + 10.0)));
}

struct IslandParts {
  ChargeQubitSpec spec;
  double c_sigma = 0.0;  // fF
};

// Junction (or SQUID) from an island to ground with an optional gate. `extra`
// lists elements already claimed by the caller; `extra_cap` adds to C_sigma.
std::optional<IslandParts> match_island(const Netlist& net, Checker& c, ElementSet used,
                                        double extra_cap, const std::string& required_island) {
  const std::string g = net.ground();
  const auto jjs = junctions(net);
  if (!c.check(jjs.size() == 1, "exactly one junction or SQUID (found " + std::to_string(jjs.size()) + ")")) {
    return std::nullopt;
  }
  const Element& j = *jjs.front();
  if (!c.check(j.a == g || j.b == g, "junction " + j.name + " connects an island to ground")) {
    return std::nullopt;
  }
  const std::string island = j.other(g);
  if (!required_island.empty() &&
      !c.check(island == required_island, "junction sits on the coupled island " + required_island)) {
    return std::nullopt;
  }
  used.insert(&j);
  if (!c.check(of_kind(net, ElementKind::kCurrentBias).empty(), "no current bias")) return std::nullopt;
  if (!c.check(net.loops.empty(), "no declared loops")) return std::nullopt;

  const auto sources = of_kind(net, ElementKind::kVoltageSource);
  if (!c.check(sources.size() <= 1, "at most one voltage source")) return std::nullopt;
  double cg = 0.0;
  double vg = 0.0;
  if (!sources.empty()) {
    const Element& v = *sources.front();
    vg = v.param("V");
    used.insert(&v);
    if (v.connects(island, g)) {
      cg = v.param("Cg");
      if (!c.check(cg > 0.0, "source " + v.name + " on the island carries a gate capacitance Cg > 0")) {
        return std::nullopt;
      }
    } else {
      if (!c.check(v.a == g || v.b == g, "source " + v.name + " is referenced to ground")) return std::nullopt;
      const std::string gate = v.other(g);
      std::vector<const Element*> gate_caps;
      for (const Element* e : of_kind(net, ElementKind::kCapacitor)) {
        if (e->connects(island, gate)) gate_caps.push_back(e);
      }
      if (!c.check(gate_caps.size() == 1, "exactly one gate capacitor between " + island + " and " + gate)) {
        return std::nullopt;
      }
      if (!c.check(v.param("Cg") == 0.0, "source " + v.name + " does not also carry Cg")) return std::nullopt;
      cg = gate_caps.front()->param("C");
      used.insert(gate_caps.front());
    }
  }
  double shunt = 0.0;
  for (const Element* e : of_kind(net, ElementKind::kCapacitor)) {
    if (e->connects(island, g)) {
      shunt += e->param("C");
      used.insert(e);
    }
  }
  const std::string rest = leftovers(net, used);
  if (!c.check(rest.empty(), "no other elements" + (rest.empty() ? "" : " (unexpected: " + rest + ")"))) {
    return std::nullopt;
  }
  const std::string idle = unused_nodes(net, used);
  if (!c.check(idle.empty(), "no floating nodes" + (idle.empty() ? "" : " (unused: " + idle + ")"))) {
    return std::nullopt;
  }
  const double cj = j.param("CJ");
  IslandParts out;
  out.c_sigma = cj + cg + shunt + extra_cap;
  if (!c.check(out.c_sigma > 0.0, "total island capacitance CJ + Cg + shunts > 0")) return std::nullopt;
  out.spec.ec = constants::charging_energy_ghz(out.c_sigma);
  out.spec.ej = junction_ej(j);
  out.spec.ng = constants::offset_charge(cg, vg);
  out.spec.ncut = charge_cutoff(out.spec.ej, out.spec.ec);
  return out;
}

void try_cpb(const Netlist& net, Attempt& at) {
  auto parts = match_island(net, at.checker, {}, 0.0, "");
  if (parts) at.spec = parts->spec;
}

void try_flux(const Netlist& net, Attempt& at) {
  Checker& c = at.checker;
  const auto jjs = junctions(net);
  std::map<std::string, int> degree;
  for (const Element* e : jjs) {
    ++degree[e->a];
    ++degree[e->b];
  }
  bool ring = jjs.size() >= 2;
  for (const auto& [node, d] : degree) ring = ring && d == 2;
  if (ring) {
    // Connected: walk the ring from the first junction.
    std::set<const Element*> seen{jjs.front()};
    std::string at_node = jjs.front()->b;
    while (at_node != jjs.front()->a) {
      const Element* step = nullptr;
      for (const Element* e : jjs) {
        if (!seen.count(e) && (e->a == at_node || e->b == at_node)) step = e;
      }
      if (!step) break;
      seen.insert(step);
      at_node = step->other(at_node);
    }
    ring = seen.size() == jjs.size();
  }
  if (!c.check(ring, "junctions form a single closed loop")) return;

  const Loop* loop = nullptr;
  for (const auto& l : net.loops) {
    std::set<std::string> listed(l.elements.begin(), l.elements.end());
    std::set<std::string> names;
    for (const Element* e : jjs) names.insert(e->name);
    if (listed == names) loop = &l;
  }
  if (!c.check(loop != nullptr, "a declared loop lists exactly the loop junctions (external flux)")) return;
  if (!c.check(jjs.size() == 3, "loop has exactly three junctions (found " + std::to_string(jjs.size()) + ")")) {
    return;
  }
  bool plain = true;
  for (const Element* e : jjs) plain = plain && e->kind == ElementKind::kJunction;
  if (!c.check(plain, "loop junctions are single junctions, not SQUIDs")) return;
  if (!c.check(degree.count(net.ground()) == 1, "ground is a loop node")) return;
  const ElementSet used(jjs.begin(), jjs.end());
  const std::string rest = leftovers(net, used);
  if (!c.check(rest.empty(), "no other elements" + (rest.empty() ? "" : " (unexpected: " + rest + ")"))) return;
  const std::string idle = unused_nodes(net, used);
  if (!c.check(idle.empty(), "no floating nodes" + (idle.empty() ? "" : " (unused: " + idle + ")"))) return;

  // Find the equal pair; the remaining junction is the alpha junction.
  int odd = -1;
  for (int k = 0; k < 3 && odd < 0; ++k) {
    const double x = jjs[(k + 1) % 3]->param("EJ");
    const double y = jjs[(k + 2) % 3]->param("EJ");
    if (std::abs(x - y) <= 1e-9 * std::max(x, y)) odd = k;
  }
  if (!c.check(odd >= 0, "two junctions share the same EJ")) return;
  const Element& big1 = *jjs[(odd + 1) % 3];
  const Element& big2 = *jjs[(odd + 2) % 3];
  const double ej = big1.param("EJ");
  if (!c.check(ej > 0.0, "equal junctions have EJ > 0")) return;
  const double cj = big1.param("CJ");
  if (!c.check(cj > 0.0 && std::abs(cj - big2.param("CJ")) <= 1e-9 * cj,
               "equal junctions share a capacitance CJ > 0")) {
    return;
  }
  FluxQubitSpec spec;
  spec.ej = ej;
  spec.alpha = jjs[odd]->param("EJ") / ej;
  spec.ec = constants::charging_energy_ghz(cj);
  spec.flux = loop->flux;
  if (!c.check(spec.alpha > 0.0, "alpha = EJ(small) / EJ > 0")) return;
  at.spec = spec;
}

void try_phase(const Netlist& net, Attempt& at) {
  Checker& c = at.checker;
  const std::string g = net.ground();
  const auto jjs = junctions(net);
  if (!c.check(jjs.size() == 1, "exactly one junction or SQUID (found " + std::to_string(jjs.size()) + ")")) return;
  const Element& j = *jjs.front();
  if (!c.check(j.a == g || j.b == g, "junction " + j.name + " connects an island to ground")) return;
  const std::string island = j.other(g);
  const auto biases = of_kind(net, ElementKind::kCurrentBias);
  if (!c.check(biases.size() == 1, "exactly one current bias")) return;
  if (!c.check(biases.front()->connects(island, g), "current bias is in parallel with " + j.name)) return;
  if (!c.check(net.loops.empty(), "no declared loops")) return;
  ElementSet used{&j, biases.front()};
  double shunt = 0.0;
  for (const Element* e : of_kind(net, ElementKind::kCapacitor)) {
    if (e->connects(island, g)) {
      shunt += e->param("C");
      used.insert(e);
    }
  }
  const std::string rest = leftovers(net, used);
  if (!c.check(rest.empty(), "no other elements" + (rest.empty() ? "" : " (unexpected: " + rest + ")"))) return;
  const std::string idle = unused_nodes(net, used);
  if (!c.check(idle.empty(), "no floating nodes" + (idle.empty() ? "" : " (unused: " + idle + ")"))) return;
  const double csum = j.param("CJ") + shunt;
  if (!c.check(csum > 0.0, "junction capacitance plus shunts > 0")) return;
  PhaseQubitSpec spec;
  spec.ej = junction_ej(j);
  spec.ec = constants::charging_energy_ghz(csum);
  spec.bias = biases.front()->param("b");
  if (!c.check(spec.ej > 0.0, "junction EJ > 0")) return;
  at.spec = spec;
}

void try_resonator(const Netlist& net, Attempt& at) {
  Checker& c = at.checker;
  const std::string g = net.ground();
  const auto inductors = of_kind(net, ElementKind::kInductor);
  if (!c.check(inductors.size() == 1, "exactly one inductor (found " + std::to_string(inductors.size()) + ")")) {
    return;
  }
  const Element& l = *inductors.front();
  if (!c.check(l.a == g || l.b == g, "inductor " + l.name + " connects a resonator node to ground")) return;
  const std::string r = l.other(g);
  ElementSet used{&l};
  double cr = 0.0;
  std::vector<const Element*> couplers;
  for (const Element* e : of_kind(net, ElementKind::kCapacitor)) {
    if (e->connects(r, g)) {
      cr += e->param("C");
      used.insert(e);
    } else if (e->a == r || e->b == r) {
      couplers.push_back(e);
    }
  }
  if (!c.check(cr > 0.0, "resonator capacitance from " + r + " to ground > 0")) return;
  if (!c.check(couplers.size() == 1, "exactly one coupling capacitor on " + r)) return;
  const Element& cc = *couplers.front();
  used.insert(&cc);
  const auto island = match_island(net, c, used, cc.param("C"), cc.other(r));
  if (!island) return;

  QubitResonatorSpec spec;
  spec.qubit = island->spec;
  spec.coupling_cap_ff = cc.param("C");
  const Spectrum s = eigensolve(build_cpb(spec.qubit), 2, true);
  const double n01 = std::abs(matrix_element(charge_number_operator(spec.qubit.ncut, spec.qubit.ng), s, 0, 1));
  const double fr = constants::lc_frequency_ghz(l.param("L"), cr);
  const double vrms = std::sqrt(constants::kPlanck * fr * constants::kGigaHertz / (2.0 * cr * constants::kFemtoFarad));
  const double beta = cc.param("C") / island->c_sigma;
  spec.cavity.omega_r = fr;
  spec.cavity.omega01 = s.eigenvalues[1] - s.eigenvalues[0];
  spec.cavity.g = 2.0 * constants::kElementaryCharge * beta * vrms * n01 / constants::kPlanck /
                  constants::kGigaHertz;
  at.spec = spec;
}

}  // namespace

std::string to_string(Template t) {
  switch (t) {
    case Template::kCpb: return "CPB";
    case Template::kFlux3jj: return "FLUX3JJ";
    case Template::kPhase: return "PHASE";
    case Template::kQubitPlusResonator: return "QUBIT_PLUS_RESONATOR";
  }
  return "UNKNOWN";
}

RecognizedTopology recognize(const Netlist& net) {
  std::vector<Attempt> attempts;
  for (Template t : {Template::kCpb, Template::kFlux3jj, Template::kPhase, Template::kQubitPlusResonator}) {
    attempts.push_back({t, std::nullopt, Checker(t)});
  }
  RecognizedTopology out;
  for (auto& at : attempts) {
    switch (at.kind) {
      case Template::kCpb: try_cpb(net, at); break;
      case Template::kFlux3jj: try_flux(net, at); break;
      case Template::kPhase: try_phase(net, at); break;
      case Template::kQubitPlusResonator: try_resonator(net, at); break;
    }
    out.diagnostics.insert(out.diagnostics.end(), at.checker.trace().begin(), at.checker.trace().end());
    if (at.spec) {
      out.kind = at.kind;
      out.spec = *at.spec;
      // Physics preconditions of the target model.
      std::visit([](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, QubitResonatorSpec>) {
          s.qubit.validate();
          s.cavity.validate();
        } else {
          s.validate();
        }
      }, out.spec);
      return out;
    }
  }
  const Attempt* best = &attempts.front();
  for (const auto& at : attempts) {
    if (at.checker.score() > best->checker.score()) best = &at;
  }
  std::string message = "unrecognized topology: closest template " + to_string(best->kind) +
                        " failed at '" + best->checker.failure() + "'";
  message += "\n" + std::string("match trace:");
  for (const auto& line : out.diagnostics) message += "\n  " + line;
  throw RecognitionError(to_string(best->kind), message);
}

}  // namespace jjq
