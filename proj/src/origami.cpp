#include "origami/origami.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "origami/error.hpp"

namespace origami {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<std::size_t>& parent, std::size_t a, std::size_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

std::size_t corner_index(std::size_t j, Corner c) { return 4 * j + static_cast<std::size_t>(c); }

// First square not reached from square 0 under <h, v>, if any.
std::optional<std::size_t> unreachable_square(const Permutation& h, const Permutation& v) {
  std::size_t n = h.size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> todo;
  seen[0] = true;
  todo.push(0);
  while (!todo.empty()) {
    std::size_t j = todo.front();
    todo.pop();
    for (std::size_t k : {h(j), v(j)}) {
      if (!seen[k]) {
        seen[k] = true;
        todo.push(k);
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!seen[j]) return j;
  }
  return std::nullopt;
}

}  // namespace

Origami::Origami(Permutation h, Permutation v, std::vector<std::string> names)
    : h_(std::move(h)), v_(std::move(v)), names_(std::move(names)) {
  if (h_.size() == 0) throw Error(ErrorKind::SizeMismatch, "origami needs at least one square");
  if (h_.size() != v_.size()) throw Error(ErrorKind::SizeMismatch, "h and v sizes differ");
  if (!names_.empty() && names_.size() != h_.size()) {
    throw Error(ErrorKind::SizeMismatch, "names do not match square count");
  }
  if (auto lost = unreachable_square(h_, v_)) {
    throw Error(ErrorKind::NotTransitive, "square " + std::to_string(*lost) + " is unreachable");
  }
  h_inv_ = h_.inverse();
  v_inv_ = v_.inverse();
  std::size_t n = size();
  edges_.resize(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    edges_[j] = EdgeClass{j, true, j, h_(j), std::nullopt, false};
    edges_[n + j] = EdgeClass{n + j, false, j, v_(j), std::nullopt, false};
  }
  build_vertices();
}

void Origami::build_vertices() {
  std::size_t n = size();
  std::vector<std::size_t> parent(4 * n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    unite(parent, corner_index(j, Corner::TopRight), corner_index(h_(j), Corner::TopLeft));
    unite(parent, corner_index(j, Corner::BottomRight), corner_index(h_(j), Corner::BottomLeft));
    unite(parent, corner_index(j, Corner::TopLeft), corner_index(v_(j), Corner::BottomLeft));
    unite(parent, corner_index(j, Corner::TopRight), corner_index(v_(j), Corner::BottomRight));
  }
  vertex_of_corner_.assign(4 * n, 0);
  std::vector<std::size_t> id_of_root(4 * n, static_cast<std::size_t>(-1));
  vertex_corners_.clear();
  for (std::size_t c = 0; c < 4 * n; ++c) {
    std::size_t root = find_root(parent, c);
    if (id_of_root[root] == static_cast<std::size_t>(-1)) {
      id_of_root[root] = vertex_corners_.size();
      vertex_corners_.emplace_back();
    }
    std::size_t id = id_of_root[root];
    vertex_of_corner_[c] = id;
    vertex_corners_[id].emplace_back(c / 4, static_cast<Corner>(c % 4));
  }
}

std::string Origami::square_name(std::size_t j) const {
  return names_.empty() ? std::to_string(j) : names_[j];
}

std::size_t Origami::edge_of(std::size_t j, Side side) const {
  switch (side) {
    case Side::Right: return vertical_edge(j);
    case Side::Left: return vertical_edge(h_inv_(j));
    case Side::Top: return horizontal_edge(j);
    case Side::Bottom: return horizontal_edge(v_inv_(j));
  }
  return 0;
}

std::optional<std::size_t> Origami::edge_with_label(const std::string& label) const {
  for (const auto& e : edges_) {
    if (e.label && *e.label == label) return e.id;
  }
  return std::nullopt;
}

Origami Origami::with_labels(const std::vector<std::optional<std::string>>& labels) const {
  if (labels.size() != edges_.size()) throw Error(ErrorKind::SizeMismatch, "one label slot per edge class");
  Origami out = *this;
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    out.edges_[id].label = labels[id];
    out.edges_[id].dotted = !labels[id].has_value();
  }
  out.has_labels_ = true;
  return out;
}

SurfacePoint Origami::normalize(SurfacePoint p) const {
  if (p.square >= size() || p.x < 0 || p.x > 1 || p.y < 0 || p.y > 1) {
    throw Error(ErrorKind::OutOfRange, "point outside its square");
  }
  if (p.x == 1) {
    p.square = h_(p.square);
    p.x = 0;
  }
  if (p.y == 1) {
    p.square = v_(p.square);
    p.y = 0;
  }
  return p;
}

std::optional<std::size_t> Origami::vertex_at(const SurfacePoint& raw) const {
  SurfacePoint p = normalize(raw);
  if (p.x == 0 && p.y == 0) return vertex_of(p.square, Corner::BottomLeft);
  return std::nullopt;
}

std::vector<SurfacePoint> Origami::representations(const SurfacePoint& raw) const {
  SurfacePoint p = normalize(raw);
  std::vector<SurfacePoint> out;
  bool on_x = p.x == 0;
  bool on_y = p.y == 0;
  if (on_x && on_y) {
    for (auto [j, c] : vertex_corners(vertex_of(p.square, Corner::BottomLeft))) {
      Rational cx = (c == Corner::BottomRight || c == Corner::TopRight) ? 1 : 0;
      Rational cy = (c == Corner::TopLeft || c == Corner::TopRight) ? 1 : 0;
      out.push_back({j, cx, cy});
    }
    return out;
  }
  out.push_back(p);
  if (on_x) out.push_back({h_inv_(p.square), Rational(1), p.y});
  if (on_y) out.push_back({v_inv_(p.square), p.x, Rational(1)});
  return out;
}

Origami make_origami(std::size_t n, const std::vector<std::size_t>& h,
                     const std::vector<std::size_t>& v, std::vector<std::string> names) {
  if (h.size() != n || v.size() != n) throw Error(ErrorKind::SizeMismatch, "permutation size differs from n");
  return Origami(Permutation(h), Permutation(v), std::move(names));
}

std::size_t ornithorynque_index(int i, int a, int b) {
  int ii = ((i % 3) + 3) % 3;
  return static_cast<std::size_t>(4 * ii + 2 * a + b);
}

std::array<std::size_t, 4> ornithorynque_tile(int i) {
  return {ornithorynque_index(i, 1, 0), ornithorynque_index(i, 0, 0),
          ornithorynque_index(i, 1, 1), ornithorynque_index(i, 0, 1)};
}

Origami builtin_ornithorynque() {
  std::vector<std::size_t> h(12), v(12);
  std::vector<std::string> names(12);
  for (int i = 0; i < 3; ++i) {
    h[ornithorynque_index(i, 0, 0)] = ornithorynque_index(i + 1, 1, 0);
    h[ornithorynque_index(i, 0, 1)] = ornithorynque_index(i - 1, 1, 1);
    h[ornithorynque_index(i, 1, 0)] = ornithorynque_index(i, 0, 0);
    h[ornithorynque_index(i, 1, 1)] = ornithorynque_index(i, 0, 1);
    v[ornithorynque_index(i, 0, 0)] = ornithorynque_index(i - 1, 0, 1);
    v[ornithorynque_index(i, 0, 1)] = ornithorynque_index(i, 0, 0);
    v[ornithorynque_index(i, 1, 0)] = ornithorynque_index(i + 1, 1, 1);
    v[ornithorynque_index(i, 1, 1)] = ornithorynque_index(i, 1, 0);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        names[ornithorynque_index(i, a, b)] =
            "(" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + ")";
      }
    }
  }
  Origami o = make_origami(12, h, v, names);
  std::vector<std::optional<std::string>> labels(24);
  for (int i = 0; i < 3; ++i) {
    std::string idx = std::to_string(i);
    labels[o.horizontal_edge(ornithorynque_index(i, 1, 0))] = "A" + idx;
    labels[o.horizontal_edge(ornithorynque_index(i, 0, 0))] = "B" + idx;
    labels[o.vertical_edge(ornithorynque_index(i, 0, 0))] = "C" + idx;
    labels[o.vertical_edge(ornithorynque_index(i, 0, 1))] = "D" + idx;
  }
  return o.with_labels(labels);
}

Origami builtin_genus2_L() {
  return Origami(Permutation::from_cycles(3, {{0, 1}}), Permutation::from_cycles(3, {{0, 2}}));
}

Origami builtin_torus() { return Origami(Permutation::identity(1), Permutation::identity(1)); }

std::optional<Origami> builtin_by_name(const std::string& name) {
  if (name == "ornithorynque" || name == "X_O") return builtin_ornithorynque();
  if (name == "genus2_L" || name == "L") return builtin_genus2_L();
  if (name == "torus") return builtin_torus();
  return std::nullopt;
}

ConeData cone_data(const Origami& o) {
  ConeData out;
  Permutation c = commutator(o.v(), o.h());
  long sum_k = 0;
  for (auto& cycle : c.cycles()) {
    if (cycle.size() == 1) {
      ++out.regular_vertices;
      continue;
    }
    Cone cone;
    cone.vertex = o.vertex_of(cycle.front(), Corner::TopRight);
    cone.order = cycle.size() - 1;
    cone.cycle = std::move(cycle);
    sum_k += static_cast<long>(cone.order);
    out.cones.push_back(std::move(cone));
  }
  out.genus = static_cast<int>(sum_k / 2 + 1);
  return out;
}

namespace {

// Relabeling sigma of a's squares onto b's with sigma(0) = target, if consistent.
std::optional<std::vector<std::size_t>> anchored_map(const Origami& a, const Origami& b,
                                                     std::size_t target) {
  std::size_t n = a.size();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> sigma(n, unset);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> stack{0};
  sigma[0] = target;
  used[target] = true;
  while (!stack.empty()) {
    std::size_t j = stack.back();
    stack.pop_back();
    std::pair<std::size_t, std::size_t> moves[] = {
        {a.h()(j), b.h()(sigma[j])}, {a.v()(j), b.v()(sigma[j])}};
    for (auto [src, dst] : moves) {
      if (sigma[src] == unset) {
        if (used[dst]) return std::nullopt;
        sigma[src] = dst;
        used[dst] = true;
        stack.push_back(src);
      } else if (sigma[src] != dst) {
        return std::nullopt;
      }
    }
  }
  return sigma;
}

}  // namespace

std::vector<Permutation> automorphism_group(const Origami& o) {
  std::vector<Permutation> out;
  for (std::size_t t = 0; t < o.size(); ++t) {
    if (auto sigma = anchored_map(o, o, t)) out.emplace_back(std::move(*sigma));
  }
  return out;
}

std::optional<Permutation> is_isomorphic(const Origami& a, const Origami& b) {
  if (a.size() != b.size()) return std::nullopt;
  for (std::size_t t = 0; t < b.size(); ++t) {
    if (auto sigma = anchored_map(a, b, t)) return Permutation(std::move(*sigma));
  }
  return std::nullopt;
}

std::vector<std::size_t> canonical_form(const Origami& o) {
  std::size_t n = o.size();
  std::vector<std::size_t> best;
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  for (std::size_t start = 0; start < n; ++start) {
    // Label squares in breadth-first order from `start`, trying h before v.
    std::vector<std::size_t> label(n, unset), order;
    label[start] = 0;
    order.push_back(start);
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (std::size_t next : {o.h()(order[k]), o.v()(order[k])}) {
        if (label[next] == unset) {
          label[next] = order.size();
          order.push_back(next);
        }
      }
    }
    std::vector<std::size_t> form(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      form[k] = label[o.h()(order[k])];
      form[n + k] = label[o.v()(order[k])];
    }
    if (best.empty() || form < best) best = std::move(form);
  }
  return best;
}

namespace {

std::vector<std::size_t> parse_list(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::size_t> out;
  long long x;
  while (is >> x) {
    if (x < 0) throw Error(ErrorKind::Parse, "negative square index");
    out.push_back(static_cast<std::size_t>(x));
  }
  if (!is.eof()) throw Error(ErrorKind::Parse, "non-integer entry in '" + text + "'");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Origami read_origami(std::istream& in) {
  std::optional<std::size_t> n;
  std::optional<std::vector<std::size_t>> h, v;
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "n") {
      auto vals = parse_list(value);
      if (vals.size() != 1) throw Error(ErrorKind::Parse, "n= takes one integer");
      n = vals[0];
    } else if (key == "h") {
      h = parse_list(value);
    } else if (key == "v") {
      v = parse_list(value);
    } else if (key == "names") {
      std::istringstream is(value);
      std::string name;
      while (is >> name) names.push_back(name);
    } else {
      throw Error(ErrorKind::Parse, "unknown key '" + key + "'");
    }
  }
  if (!n || !h || !v) throw Error(ErrorKind::Parse, "origami file needs n=, h= and v= lines");
  return make_origami(*n, *h, *v, std::move(names));
}

Origami read_origami_file(const std::string& path) {
  if (auto builtin = builtin_by_name(path)) return *builtin;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open origami file '" + path + "'");
  return read_origami(in);
}

void write_origami(std::ostream& out, const Origami& o) {
  out << "n=" << o.size() << "\n";
  out << "h=" << o.h().to_string() << "\n";
  out << "v=" << o.v().to_string() << "\n";
  if (!o.names().empty()) {
    out << "names=";
    for (std::size_t j = 0; j < o.size(); ++j) out << (j ? " " : "") << o.names()[j];
    out << "\n";
  }
}

}  // namespace origami
