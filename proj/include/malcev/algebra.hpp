#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "malcev/errors.hpp"

namespace malcev {

// A term over the operations of an algebra, with constants from its universe.
// Nodes are stored in topological order: children always precede parents, so a
// single bottom-up sweep evaluates the whole DAG.
struct TermDag {
  enum class Kind : std::uint8_t { Var, Const, Apply };

  struct Node {
    Kind kind;
    int payload;            // Var: variable index; Const: universe element; Apply: op index
    std::vector<int> kids;  // Apply only

    friend bool operator==(const Node&, const Node&) = default;
    friend auto operator<=>(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;
  int root = -1;

  bool empty() const { return root < 0; }
  std::size_t size() const { return nodes.size(); }
};

// Hash-consing builder: structurally equal subterms share one node.
class DagBuilder {
 public:
  DagBuilder() = default;
  explicit DagBuilder(TermDag seed) : dag_(std::move(seed)) {
    for (int i = 0; i < static_cast<int>(dag_.nodes.size()); ++i) memo_[dag_.nodes[i]] = i;
  }

  int var(int index) { return intern({TermDag::Kind::Var, index, {}}); }
  int constant(int value) { return intern({TermDag::Kind::Const, value, {}}); }
  int apply(int op, std::vector<int> kids) {
    return intern({TermDag::Kind::Apply, op, std::move(kids)});
  }

  // Copies the reachable part of `other` into this builder; `var_map[i]`, when
  // present, gives the node id substituted for Variable(i).
  int import(const TermDag& other, std::span<const int> var_map = {}) {
    std::vector<int> translated(other.nodes.size(), -1);
    for (int i = 0; i <= other.root; ++i) {
      const auto& node = other.nodes[i];
      switch (node.kind) {
        case TermDag::Kind::Var:
          if (node.payload < static_cast<int>(var_map.size()) && var_map[node.payload] >= 0)
            translated[i] = var_map[node.payload];
          else
            translated[i] = var(node.payload);
          break;
        case TermDag::Kind::Const:
          translated[i] = constant(node.payload);
          break;
        case TermDag::Kind::Apply: {
          std::vector<int> kids;
          kids.reserve(node.kids.size());
          for (int k : node.kids) kids.push_back(translated[k]);
          translated[i] = apply(node.payload, std::move(kids));
          break;
        }
      }
    }
    return translated[other.root];
  }

  TermDag take(int root) && {
    dag_.root = root;
    return std::move(dag_);
  }

  const TermDag& peek() const { return dag_; }

 private:
  int intern(TermDag::Node node) {
    auto it = memo_.find(node);
    if (it != memo_.end()) return it->second;
    int id = static_cast<int>(dag_.nodes.size());
    dag_.nodes.push_back(node);
    memo_.emplace(std::move(node), id);
    return id;
  }

  TermDag dag_;
  std::map<TermDag::Node, int> memo_;
};

struct Operation {
  std::string name;
  int arity = 0;
  std::vector<int> table;  // row-major: index of (x_1..x_k) is sum x_i * n^(k-i)
};

struct FiniteAlgebra {
  std::string name;
  int size = 0;
  std::vector<Operation> ops;
  std::optional<TermDag> malcev_term;  // validated ternary term, when supplied

  int op_index(const std::string& op_name) const {
    for (int i = 0; i < static_cast<int>(ops.size()); ++i)
      if (ops[i].name == op_name) return i;
    fail(errc::unknown_operation, "no operation named '" + op_name + "'");
  }

  int apply(int op, std::span<const int> args) const {
    const Operation& f = ops[op];
    std::size_t idx = 0;
    for (int a : args) idx = idx * size + a;
    return f.table[idx];
  }
};

inline void validate_algebra(const FiniteAlgebra& a) {
  check(a.size > 0, errc::malformed_document, "algebra size must be positive");
  std::vector<std::string> names;
  for (const auto& op : a.ops) {
    check(op.arity >= 0, errc::malformed_document, "operation arity must be >= 0");
    std::size_t expect = 1;
    for (int i = 0; i < op.arity; ++i) expect *= a.size;
    if (op.table.size() != expect)
      fail(errc::table_length_mismatch,
           "operation '" + op.name + "' has table length " + std::to_string(op.table.size()) +
               ", expected " + std::to_string(expect));
    for (int v : op.table)
      if (v < 0 || v >= a.size)
        fail(errc::entry_out_of_range,
             "operation '" + op.name + "' table contains " + std::to_string(v));
    names.push_back(op.name);
  }
  std::sort(names.begin(), names.end());
  check(std::adjacent_find(names.begin(), names.end()) == names.end(), errc::malformed_document,
        "operation names must be unique");
}

// --- term evaluation ------------------------------------------------------

inline void validate_term(const FiniteAlgebra& a, const TermDag& t) {
  check(!t.empty() && t.root < static_cast<int>(t.nodes.size()), errc::malformed_document,
        "term has no root");
  for (int i = 0; i < static_cast<int>(t.nodes.size()); ++i) {
    const auto& node = t.nodes[i];
    switch (node.kind) {
      case TermDag::Kind::Var:
        check(node.payload >= 0, errc::malformed_document, "negative variable index");
        break;
      case TermDag::Kind::Const:
        check(node.payload >= 0 && node.payload < a.size, errc::entry_out_of_range,
              "term constant " + std::to_string(node.payload));
        break;
      case TermDag::Kind::Apply: {
        check(node.payload >= 0 && node.payload < static_cast<int>(a.ops.size()),
              errc::unknown_operation, "term references operation #" + std::to_string(node.payload));
        check(static_cast<int>(node.kids.size()) == a.ops[node.payload].arity,
              errc::arity_mismatch, "application of '" + a.ops[node.payload].name + "'");
        for (int k : node.kids)
          check(k >= 0 && k < i, errc::malformed_document, "term nodes are not topologically ordered");
        break;
      }
    }
  }
}

inline int term_arity(const TermDag& t) {
  int arity = 0;
  for (const auto& node : t.nodes)
    if (node.kind == TermDag::Kind::Var) arity = std::max(arity, node.payload + 1);
  return arity;
}

inline int eval_term(const FiniteAlgebra& a, const TermDag& t, std::span<const int> args) {
  validate_term(a, t);
  check(term_arity(t) <= static_cast<int>(args.size()), errc::arity_mismatch,
        "term needs more arguments than supplied");
  std::vector<int> value(t.root + 1, 0);
  std::vector<int> buf;
  for (int i = 0; i <= t.root; ++i) {
    const auto& node = t.nodes[i];
    switch (node.kind) {
      case TermDag::Kind::Var: value[i] = args[node.payload]; break;
      case TermDag::Kind::Const: value[i] = node.payload; break;
      case TermDag::Kind::Apply:
        buf.clear();
        for (int k : node.kids) buf.push_back(value[k]);
        value[i] = a.apply(node.payload, buf);
        break;
    }
  }
  return value[t.root];
}

// Evaluates the term on all n^arity argument tuples at once.
inline std::vector<int> term_table(const FiniteAlgebra& a, const TermDag& t, int arity) {
  validate_term(a, t);
  check(term_arity(t) <= arity, errc::arity_mismatch, "term arity exceeds requested table arity");
  std::size_t total = 1;
  for (int i = 0; i < arity; ++i) total *= a.size;
  // column j of the argument grid: value of variable j at tuple index r
  auto var_at = [&](int var, std::size_t r) {
    std::size_t stride = 1;
    for (int i = var + 1; i < arity; ++i) stride *= a.size;
    return static_cast<int>((r / stride) % a.size);
  };
  std::vector<std::vector<int>> value(t.root + 1);
  std::vector<int> buf;
  for (int i = 0; i <= t.root; ++i) {
    const auto& node = t.nodes[i];
    value[i].resize(total);
    switch (node.kind) {
      case TermDag::Kind::Var:
        for (std::size_t r = 0; r < total; ++r) value[i][r] = var_at(node.payload, r);
        break;
      case TermDag::Kind::Const:
        std::fill(value[i].begin(), value[i].end(), node.payload);
        break;
      case TermDag::Kind::Apply:
        for (std::size_t r = 0; r < total; ++r) {
          buf.clear();
          for (int k : node.kids) buf.push_back(value[k][r]);
          value[i][r] = a.apply(node.payload, buf);
        }
        break;
    }
  }
  return std::move(value[t.root]);
}

// --- S-expressions --------------------------------------------------------
//
// Grammar: term := var | int | '(' opname term... ')'
// Variables: x y z name positions 0 1 2; xN names position N.

namespace detail {

inline std::vector<std::string> sexpr_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (c == '(' || c == ')') {
      flush();
      out.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

inline std::optional<int> sexpr_var_index(const std::string& tok) {
  if (tok == "x") return 0;
  if (tok == "y") return 1;
  if (tok == "z") return 2;
  if (tok.size() >= 2 && tok[0] == 'x' &&
      std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return std::stoi(tok.substr(1));
  return std::nullopt;
}

inline int parse_sexpr(const FiniteAlgebra& a, const std::vector<std::string>& toks, std::size_t& pos,
                       DagBuilder& b) {
  check(pos < toks.size(), errc::malformed_document, "unexpected end of term");
  const std::string& tok = toks[pos];
  if (tok == "(") {
    ++pos;
    check(pos < toks.size() && toks[pos] != "(" && toks[pos] != ")", errc::malformed_document,
          "expected operation name after '('");
    int op = a.op_index(toks[pos]);
    ++pos;
    std::vector<int> kids;
    while (pos < toks.size() && toks[pos] != ")") kids.push_back(parse_sexpr(a, toks, pos, b));
    check(pos < toks.size(), errc::malformed_document, "missing ')'");
    ++pos;  // consume ')'
    check(static_cast<int>(kids.size()) == a.ops[op].arity, errc::arity_mismatch,
          "application of '" + a.ops[op].name + "' in term");
    return b.apply(op, std::move(kids));
  }
  check(tok != ")", errc::malformed_document, "unexpected ')'");
  ++pos;
  if (auto v = sexpr_var_index(tok)) return b.var(*v);
  check(std::all_of(tok.begin(), tok.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-'; }),
        errc::malformed_document, "unrecognized token '" + tok + "'");
  int value = std::stoi(tok);
  check(value >= 0 && value < a.size, errc::entry_out_of_range, "term constant " + tok);
  return b.constant(value);
}

}  // namespace detail

inline TermDag parse_term(const FiniteAlgebra& a, const std::string& text) {
  auto toks = detail::sexpr_tokens(text);
  check(!toks.empty(), errc::malformed_document, "empty term");
  DagBuilder b;
  std::size_t pos = 0;
  int root = detail::parse_sexpr(a, toks, pos, b);
  check(pos == toks.size(), errc::malformed_document, "trailing tokens after term");
  TermDag dag = std::move(b).take(root);
  validate_term(a, dag);
  return dag;
}

inline std::string render_term(const FiniteAlgebra& a, const TermDag& t) {
  std::vector<std::string> text(t.root + 1);
  for (int i = 0; i <= t.root; ++i) {
    const auto& node = t.nodes[i];
    switch (node.kind) {
      case TermDag::Kind::Var:
        text[i] = node.payload == 0   ? "x"
                  : node.payload == 1 ? "y"
                  : node.payload == 2 ? "z"
                                      : "x" + std::to_string(node.payload);
        break;
      case TermDag::Kind::Const: text[i] = std::to_string(node.payload); break;
      case TermDag::Kind::Apply: {
        std::string s = "(" + a.ops[node.payload].name;
        for (int k : node.kids) s += " " + text[k];
        s += ")";
        text[i] = std::move(s);
        break;
      }
    }
  }
  return text[t.root];
}

// --- JSON I/O ---------------------------------------------------------------
//
// Schema: {"name": str, "size": int, "operations":
//          [{"name": str, "arity": int, "table": [int,...]}],
//          "malcev_term": str (optional S-expression)}

inline FiniteAlgebra load_algebra(const nlohmann::json& doc) {
  check(doc.is_object(), errc::malformed_document, "algebra document must be an object");
  check(doc.contains("name") && doc["name"].is_string(), errc::malformed_document,
        "missing string field 'name'");
  check(doc.contains("size") && doc["size"].is_number_integer(), errc::malformed_document,
        "missing integer field 'size'");
  check(doc.contains("operations") && doc["operations"].is_array(), errc::malformed_document,
        "missing array field 'operations'");

  FiniteAlgebra a;
  a.name = doc["name"].get<std::string>();
  a.size = doc["size"].get<int>();
  check(a.size > 0, errc::malformed_document, "'size' must be positive");
  for (const auto& op_doc : doc["operations"]) {
    check(op_doc.is_object() && op_doc.contains("name") && op_doc["name"].is_string() &&
              op_doc.contains("arity") && op_doc["arity"].is_number_integer() &&
              op_doc.contains("table") && op_doc["table"].is_array(),
          errc::malformed_document, "operation entries need 'name', 'arity', 'table'");
    Operation op;
    op.name = op_doc["name"].get<std::string>();
    op.arity = op_doc["arity"].get<int>();
    for (const auto& v : op_doc["table"]) {
      check(v.is_number_integer(), errc::malformed_document, "table entries must be integers");
      op.table.push_back(v.get<int>());
    }
    a.ops.push_back(std::move(op));
  }
  validate_algebra(a);
  if (doc.contains("malcev_term")) {
    check(doc["malcev_term"].is_string(), errc::malformed_document, "'malcev_term' must be a string");
    a.malcev_term = parse_term(a, doc["malcev_term"].get<std::string>());
    check(term_arity(*a.malcev_term) <= 3, errc::malformed_document,
          "'malcev_term' must be a ternary term");
  }
  return a;
}

inline nlohmann::ordered_json algebra_to_json(const FiniteAlgebra& a) {
  nlohmann::ordered_json doc;
  doc["name"] = a.name;
  doc["size"] = a.size;
  doc["operations"] = nlohmann::ordered_json::array();
  for (const auto& op : a.ops)
    doc["operations"].push_back({{"name", op.name}, {"arity", op.arity}, {"table", op.table}});
  if (a.malcev_term) doc["malcev_term"] = render_term(a, *a.malcev_term);
  return doc;
}

}  // namespace malcev
