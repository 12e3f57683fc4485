#include "jjq/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jjq/error.hpp"
#include "jjq/report.hpp"

namespace jjq {

namespace {

enum class Dimension { kCapacitance, kInductance, kFrequency, kVoltage, kNone };

struct ParamSpec {
  const char* key;
  Dimension dim;
  bool required;
  double fallback;
  bool signed_ok;  // may be negative
};

struct KindSpec {
  ElementKind kind;
  const char* keyword;
  const char* primary;  // key of the positional value, or nullptr
  std::vector<ParamSpec> params;
};

const std::vector<KindSpec>& kinds() {
  static const std::vector<KindSpec> table = {
      {ElementKind::kCapacitor, "cap", "C", {{"C", Dimension::kCapacitance, true, 0, false}}},
      {ElementKind::kInductor, "ind", "L", {{"L", Dimension::kInductance, true, 0, false}}},
      {ElementKind::kJunction,
       "jj",
       "EJ",
       {{"EJ", Dimension::kFrequency, true, 0, false},
        {"CJ", Dimension::kCapacitance, false, 0, false}}},
      {ElementKind::kSquid,
       "squid",
       nullptr,
       {{"EJ1", Dimension::kFrequency, true, 0, false},
        {"EJ2", Dimension::kFrequency, true, 0, false},
        {"CJ", Dimension::kCapacitance, false, 0, false},
        {"flux", Dimension::kNone, false, 0, true}}},
      {ElementKind::kVoltageSource,
       "vsrc",
       "V",
       {{"V", Dimension::kVoltage, true, 0, true},
        {"Cg", Dimension::kCapacitance, false, 0, false}}},
      {ElementKind::kCurrentBias, "ibias", "b", {{"b", Dimension::kNone, true, 0, false}}},
  };
  return table;
}

const KindSpec& kind_spec(ElementKind k) {
  for (const auto& s : kinds()) {
    if (s.kind == k) return s;
  }
  throw InvalidSpec("unknown element kind");
}

struct Unit {
  const char* suffix;
  Dimension dim;
  double scale;  // to the default unit of the dimension
};

constexpr Unit kUnits[] = {
    {"aF", Dimension::kCapacitance, 1e-3}, {"fF", Dimension::kCapacitance, 1.0},
    {"pF", Dimension::kCapacitance, 1e3},  {"nF", Dimension::kCapacitance, 1e6},
    {"pH", Dimension::kInductance, 1e-3},  {"nH", Dimension::kInductance, 1.0},
    {"uH", Dimension::kInductance, 1e3},   {"kHz", Dimension::kFrequency, 1e-6},
    {"MHz", Dimension::kFrequency, 1e-3},  {"GHz", Dimension::kFrequency, 1.0},
    {"uV", Dimension::kVoltage, 1e-3},     {"mV", Dimension::kVoltage, 1.0},
    {"V", Dimension::kVoltage, 1e3},
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

enum class Tok { kIdent, kNumber, kEquals, kEnd, kEof };

struct Token {
  Tok type;
  std::string text;
  SourcePos pos;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::kIdent: return "'" + t.text + "'";
    case Tok::kNumber: return "number '" + t.text + "'";
    case Tok::kEquals: return "'='";
    case Tok::kEnd: return t.text == ";" ? "';'" : "end of line";
    case Tok::kEof: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      const SourcePos pos{line_, col_};
      if (c == '\n') {
        out.push_back({Tok::kEnd, "\n", pos});
        advance();
      } else if (c == ';') {
        out.push_back({Tok::kEnd, ";", pos});
        advance();
      } else if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '=') {
        out.push_back({Tok::kEquals, "=", pos});
        advance();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back({Tok::kIdent, take_while([](char ch) {
                         return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
                       }), pos});
      } else if (starts_number()) {
        out.push_back({Tok::kNumber, number(), pos});
      } else {
        throw ParseError(pos.line, pos.column, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Tok::kEof, "", {line_, col_}});
    return out;
  }

 private:
  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    const size_t start = i_;
    while (i_ < text_.size() && pred(text_[i_])) advance();
    return std::string(text_.substr(start, i_ - start));
  }

  bool digit_at(size_t k) const {
    return k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]));
  }

  bool starts_number() const {
    size_t k = i_;
    if (text_[k] == '+' || text_[k] == '-') ++k;
    if (digit_at(k)) return true;
    return k < text_.size() && text_[k] == '.' && digit_at(k + 1);
  }

  std::string number() {
    const size_t start = i_;
    if (text_[i_] == '+' || text_[i_] == '-') advance();
    while (i_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.')) {
      advance();
    }
    if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
      size_t k = i_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (digit_at(k)) {
        while (i_ < k) advance();
        while (digit_at(i_)) advance();
      }
    }
    while (i_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[i_]))) advance();
    return std::string(text_.substr(start, i_ - start));
  }

  std::string_view text_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Endpoint {
  std::string node;
  SourcePos pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Netlist run() {
    while (peek().type != Tok::kEof) {
      if (peek().type == Tok::kEnd) {
        ++k_;
        continue;
      }
      statement();
      const Token& t = peek();
      if (t.type != Tok::kEnd && t.type != Tok::kEof) {
        fail(t, "expected end of statement, found " + describe(t));
      }
    }
    validate();
    return std::move(net_);
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& next() { return toks_[k_++]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.pos.line, t.pos.column, msg);
  }
  [[noreturn]] static void fail(const SourcePos& p, const std::string& msg) {
    throw ParseError(p.line, p.column, msg);
  }

  const Token& expect_ident(const std::string& what) {
    const Token& t = next();
    if (t.type != Tok::kIdent) fail(t, "expected " + what + ", found " + describe(t));
    return t;
  }

  double value(const Token& t, Dimension dim, const std::string& key) {
    const std::string& s = t.text;
    size_t split = s.size();
    while (split > 0 && std::isalpha(static_cast<unsigned char>(s[split - 1]))) --split;
    const std::string digits = s.substr(0, split);
    const std::string suffix = s.substr(split);
    double x = 0.0;
    const char* first = digits.data();
    if (!digits.empty() && digits[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), x);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      fail(t, "malformed number '" + s + "'");
    }
    if (!std::isfinite(x)) fail(t, "parameter " + key + " must be finite");
    if (suffix.empty()) return x;
    for (const auto& u : kUnits) {
      if (suffix == u.suffix) {
        if (u.dim != dim) fail(t, "unit '" + suffix + "' does not apply to parameter " + key);
        return x * u.scale;
      }
    }
    fail(t, "unknown unit '" + suffix + "' for parameter " + key);
  }

  void declare_node(const Token& name, bool ground) {
    for (const auto& n : net_.nodes) {
      if (n.name == name.text) fail(name, "duplicate node name '" + name.text + "'");
    }
    if (ground) {
      for (const auto& n : net_.nodes) {
        if (n.ground) fail(name, "second ground node '" + name.text + "'; ground '" + n.name +
                                     "' is already declared");
      }
    }
    net_.nodes.push_back({name.text, ground, name.pos});
  }

  void claim_name(const Token& name) {
    if (!names_.insert(name.text).second) fail(name, "duplicate element name '" + name.text + "'");
  }

  void statement() {
    const Token& head = expect_ident("a statement keyword");
    const std::string kw = lower(head.text);
    if (kw == "node") {
      declare_node(expect_ident("node name"), false);
      while (peek().type == Tok::kIdent) declare_node(next(), false);
      return;
    }
    if (kw == "gnd") {
      declare_node(expect_ident("ground node name"), true);
      return;
    }
    if (kw == "loop") {
      loop(head);
      return;
    }
    for (const auto& spec : kinds()) {
      if (kw == spec.keyword) {
        element(head, spec);
        return;
      }
    }
    fail(head, "unknown keyword '" + head.text +
                   "' (expected node, gnd, cap, ind, jj, squid, vsrc, ibias or loop)");
  }

  void element(const Token& head, const KindSpec& spec) {
    Element e;
    e.kind = spec.kind;
    e.pos = head.pos;
    const Token& name = expect_ident("element name");
    claim_name(name);
    e.name = name.text;
    const Token& a = expect_ident("first node of " + e.name);
    const Token& b = expect_ident("second node of " + e.name);
    e.a = a.text;
    e.b = b.text;
    endpoints_.push_back({{a.text, a.pos}, {b.text, b.pos}});

    std::map<std::string, SourcePos> seen;
    if (peek().type == Tok::kNumber) {
      const Token& t = next();
      if (!spec.primary) fail(t, std::string(spec.keyword) + " takes only key=value parameters");
      const ParamSpec& p = find_param(spec, spec.primary, t);
      e.params[p.key] = checked(value(t, p.dim, p.key), p, t);
      seen[p.key] = t.pos;
    }
    while (peek().type == Tok::kIdent) {
      const Token& key = next();
      const ParamSpec& p = find_param(spec, key.text, key);
      const Token& eq = next();
      if (eq.type != Tok::kEquals) fail(eq, "expected '=' after " + key.text + ", found " + describe(eq));
      const Token& v = next();
      if (v.type != Tok::kNumber) fail(v, "expected a number for " + key.text + ", found " + describe(v));
      if (seen.count(p.key)) fail(key, "parameter " + std::string(p.key) + " given twice");
      e.params[p.key] = checked(value(v, p.dim, p.key), p, v);
      seen[p.key] = key.pos;
    }
    for (const auto& p : spec.params) {
      if (e.params.count(p.key)) continue;
      if (p.required) fail(peek(), e.name + ": missing required parameter " + p.key);
      e.params[p.key] = p.fallback;
    }
    net_.elements.push_back(std::move(e));
  }

  static const ParamSpec& find_param(const KindSpec& spec, const std::string& key, const Token& at) {
    for (const auto& p : spec.params) {
      if (lower(p.key) == lower(key)) return p;
    }
    std::string allowed;
    for (const auto& p : spec.params) allowed += (allowed.empty() ? "" : ", ") + std::string(p.key);
    fail(at, "unknown parameter '" + key + "' for " + spec.keyword + " (expected " + allowed + ")");
  }

  static double checked(double x, const ParamSpec& p, const Token& at) {
    if (!p.signed_ok && x < 0.0) fail(at, "parameter " + std::string(p.key) + " must be >= 0");
    return x;
  }

  void loop(const Token& head) {
    Loop l;
    l.pos = head.pos;
    const Token& name = expect_ident("loop name");
    claim_name(name);
    l.name = name.text;
    std::vector<Token> refs;
    bool has_flux = false;
    while (peek().type == Tok::kIdent) {
      const Token& t = next();
      if (peek().type == Tok::kEquals) {
        if (lower(t.text) != "flux") fail(t, "unknown loop parameter '" + t.text + "' (expected flux)");
        if (has_flux) fail(t, "flux given twice");
        ++k_;
        const Token& v = next();
        if (v.type != Tok::kNumber) fail(v, "expected a number for flux, found " + describe(v));
        l.flux = value(v, Dimension::kNone, "flux");
        has_flux = true;
        continue;
      }
      if (has_flux) fail(t, "loop elements must precede flux=");
      refs.push_back(t);
      l.elements.push_back(t.text);
    }
    if (refs.empty()) fail(peek(), "loop " + l.name + " lists no elements");
    loop_refs_.push_back(std::move(refs));
    net_.loops.push_back(std::move(l));
  }

  void validate() {
    std::set<std::string> declared;
    for (const auto& n : net_.nodes) declared.insert(n.name);
    for (size_t i = 0; i < net_.elements.size(); ++i) {
      const auto& e = net_.elements[i];
      for (const Endpoint& p : {endpoints_[i].first, endpoints_[i].second}) {
        if (!declared.count(p.node)) fail(p.pos, "undeclared node '" + p.node + "' in " + e.name);
      }
      if (e.a == e.b) fail(endpoints_[i].second.pos, e.name + " connects node '" + e.a + "' to itself");
    }
    if (!net_.elements.empty() && net_.ground().empty()) {
      fail(net_.elements.front().pos, "no ground node declared (use 'gnd NAME')");
    }
    for (size_t i = 0; i < net_.loops.size(); ++i) {
      std::set<std::string> seen;
      for (const Token& t : loop_refs_[i]) {
        if (!net_.find(t.text)) fail(t, "loop " + net_.loops[i].name + " references unknown element '" + t.text + "'");
        if (!seen.insert(t.text).second) fail(t, "element '" + t.text + "' listed twice in loop");
      }
    }
  }

  std::vector<Token> toks_;
  size_t k_ = 0;
  Netlist net_;
  std::set<std::string> names_;
  std::vector<std::pair<Endpoint, Endpoint>> endpoints_;
  std::vector<std::vector<Token>> loop_refs_;
};

}  // namespace

std::string keyword(ElementKind kind) { return kind_spec(kind).keyword; }

double Element::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw InvalidSpec(name + " has no parameter " + key);
  return it->second;
}

std::string Netlist::ground() const {
  for (const auto& n : nodes) {
    if (n.ground) return n.name;
  }
  return "";
}

const Element* Netlist::find(const std::string& name) const {
  for (const auto& e : elements) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Netlist parse_netlist(std::string_view text) { return Parser(Lexer(text).run()).run(); }

Netlist parse_netlist_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open netlist file '" + path + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

std::string print_netlist(const Netlist& net) {
  std::string out;
  for (const auto& n : net.nodes) out += (n.ground ? "gnd " : "node ") + n.name + "\n";
  for (const auto& e : net.elements) {
    const KindSpec& spec = kind_spec(e.kind);
    out += std::string(spec.keyword) + " " + e.name + " " + e.a + " " + e.b;
    for (const auto& p : spec.params) {
      out += " " + std::string(p.key) + "=" + report::format_number(e.param(p.key));
    }
    out += "\n";
  }
  for (const auto& l : net.loops) {
    out += "loop " + l.name;
    for (const auto& e : l.elements) out += " " + e;
    out += " flux=" + report::format_number(l.flux) + "\n";
  }
  return out;
}

std::string netlist_to_json(const Netlist& net) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["ground"] = net.ground();
  j["nodes"] = ordered_json::array();
  for (const auto& n : net.nodes) {
    j["nodes"].push_back({{"name", n.name}, {"ground", n.ground}, {"line", n.pos.line}});
  }
  j["elements"] = ordered_json::array();
  for (const auto& e : net.elements) {
    ordered_json params = ordered_json::object();
    for (const auto& p : kind_spec(e.kind).params) params[p.key] = e.param(p.key);
    j["elements"].push_back({{"name", e.name},
                             {"kind", keyword(e.kind)},
                             {"nodes", {e.a, e.b}},
                             {"params", params},
                             {"line", e.pos.line}});
  }
  j["loops"] = ordered_json::array();
  for (const auto& l : net.loops) {
    j["loops"].push_back({{"name", l.name}, {"elements", l.elements}, {"flux", l.flux},
                          {"line", l.pos.line}});
  }
  j["units"] = {{"capacitance", "fF"}, {"inductance", "nH"}, {"energy", "GHz"},
                {"voltage", "mV"},     {"flux", "Phi0"},     {"bias", "Ib/Ic"}};
  return j.dump(2) + "\n";
}

}  // namespace jjq
