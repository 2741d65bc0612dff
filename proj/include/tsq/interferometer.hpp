#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tsq/grid.hpp"
#include "tsq/states.hpp"

namespace tsq {

enum class NodeKind { source, beam_splitter, mirror, detector, blocker };

// Discrete-mode interferometer: a DAG of optical elements with directed
// edges carrying the propagation phase e^{i k L + i phi_extra}. Beam
// splitters apply (1/sqrt2) [[1, i], [i, 1]] to (in0, in1); mirrors
// multiply by i. Detectors absorb amplitude. Blockers absorb amplitude too
// but keep one geometric out-edge so the obstructed route remains
// enumerable (and is reported as closed).
template <typename Real = double>
struct PathGraph {
  using Vec2 = Eigen::Matrix<Real, 2, 1>;

  struct Node {
    NodeKind kind;
    Vec2 pos;
    std::string name;
  };
  struct Edge {
    int from = -1;
    int to = -1;
    int from_port = 0;  // beam-splitter output port (0/1); 0 otherwise
    int to_port = 0;    // beam-splitter input port (0/1); 0 otherwise
    Real length = Real(0);
    Real extra_phase = Real(0);
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Real wave_number = Real(0.4);

  int add_node(NodeKind kind, Vec2 pos, std::string name) {
    nodes.push_back({kind, std::move(pos), std::move(name)});
    return int(nodes.size()) - 1;
  }

  // Edge length defaults to the Euclidean node distance.
  void add_edge(int from, int to, int from_port = 0, int to_port = 0, Real extra_phase = Real(0)) {
    Edge e;
    e.from = from;
    e.to = to;
    e.from_port = from_port;
    e.to_port = to_port;
    e.length = (nodes[to].pos - nodes[from].pos).norm();
    e.extra_phase = extra_phase;
    edges.push_back(e);
  }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].name == name) return int(i);
    return -1;
  }
};

template <typename Real = double>
struct ModeResult {
  using Complex = std::complex<Real>;
  struct Sink {
    std::string name;
    NodeKind kind;
    Complex amplitude;
    Real probability;
  };
  std::vector<Sink> sinks;
  Real total_probability = Real(0);

  Real probability(const std::string& name) const {
    for (const auto& s : sinks)
      if (s.name == name) return s.probability;
    throw TopologyError("ModeResult: unknown sink '" + name + "'");
  }
  Complex amplitude(const std::string& name) const {
    for (const auto& s : sinks)
      if (s.name == name) return s.amplitude;
    throw TopologyError("ModeResult: unknown sink '" + name + "'");
  }
};

template <typename Real = double>
struct HandshakePath {
  std::vector<int> node_ids;
  std::vector<std::string> node_names;
  std::vector<Eigen::Matrix<Real, 2, 1>> positions;
  Real length = Real(0);
  bool open = false;
};

namespace detail {

template <typename Real>
std::vector<int> topological_order(const PathGraph<Real>& g) {
  std::vector<int> indeg(g.nodes.size(), 0);
  for (const auto& e : g.edges) ++indeg[e.to];
  std::deque<int> ready;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (indeg[i] == 0) ready.push_back(int(i));
  std::vector<int> order;
  while (!ready.empty()) {
    const int n = ready.front();
    ready.pop_front();
    order.push_back(n);
    for (const auto& e : g.edges)
      if (e.from == n && --indeg[e.to] == 0) ready.push_back(e.to);
  }
  if (order.size() != g.nodes.size())
    throw TopologyError("PathGraph: graph contains a cycle");
  return order;
}

template <typename Real>
void validate_graph(const PathGraph<Real>& g) {
  if (!(g.wave_number > Real(0))) throw TopologyError("PathGraph: wave number must be positive");
  int sources = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    int in = 0, out = 0;
    for (const auto& e : g.edges) {
      if (e.from == int(i)) ++out;
      if (e.to == int(i)) ++in;
    }
    switch (g.nodes[i].kind) {
      case NodeKind::source:
        ++sources;
        if (in != 0 || out != 1)
          throw TopologyError("PathGraph: source must have no inputs and one output");
        break;
      case NodeKind::beam_splitter:
        if (in > 2 || out != 2)
          throw TopologyError("PathGraph: beam splitter needs <= 2 inputs and exactly 2 outputs");
        break;
      case NodeKind::mirror:
        if (in != 1 || out != 1) throw TopologyError("PathGraph: mirror needs 1 input, 1 output");
        break;
      case NodeKind::detector:
        if (in != 1 || out != 0)
          throw TopologyError("PathGraph: detector is a sink with one input");
        break;
      case NodeKind::blocker:
        if (in != 1 || out > 1)
          throw TopologyError("PathGraph: blocker takes one input (pass-through edge optional)");
        break;
    }
  }
  if (sources != 1) throw TopologyError("PathGraph: exactly one source required");
  (void)topological_order(g);  // rejects cycles
}

}  // namespace detail

// Injects unit amplitude at the source and propagates through the mode
// network. Sink probabilities sum to 1 for fully wired graphs.
template <typename Real>
ModeResult<Real> propagate_modes(const PathGraph<Real>& g) {
  using Complex = std::complex<Real>;
  detail::validate_graph(g);
  const auto order = detail::topological_order(g);

  // amplitude arriving at (node, port); port 1 only used by beam splitters
  std::vector<std::array<Complex, 2>> in_amp(g.nodes.size(), {Complex(0), Complex(0)});
  ModeResult<Real> result;

  auto send = [&](const typename PathGraph<Real>::Edge& e, Complex a) {
    const Complex phase =
        std::exp(Complex(0, g.wave_number * e.length + e.extra_phase));
    in_amp[e.to][e.to_port] += a * phase;
  };

  const Complex inv_sqrt2(Real(1) / std::sqrt(Real(2)), 0);
  const Complex i_unit(0, 1);

  for (const int n : order) {
    const auto& node = g.nodes[n];
    std::array<Complex, 2> out{Complex(0), Complex(0)};
    switch (node.kind) {
      case NodeKind::source:
        out[0] = Complex(1);
        break;
      case NodeKind::beam_splitter:
        out[0] = inv_sqrt2 * (in_amp[n][0] + i_unit * in_amp[n][1]);
        out[1] = inv_sqrt2 * (i_unit * in_amp[n][0] + in_amp[n][1]);
        break;
      case NodeKind::mirror:
        out[0] = i_unit * in_amp[n][0];
        break;
      case NodeKind::detector:
      case NodeKind::blocker:
        result.sinks.push_back(
            {node.name, node.kind, in_amp[n][0], std::norm(in_amp[n][0])});
        continue;  // sinks emit nothing
    }
    for (const auto& e : g.edges)
      if (e.from == n) send(e, out[e.from_port]);
  }

  detail::Kahan<Real> total;
  for (const auto& s : result.sinks) total.add(s.probability);
  result.total_probability = total.sum;
  return result;
}

// Enumerates every simple source-to-detector route. A route is open exactly
// when no blocker lies on it: the retarded wave from the source and the
// advanced wave from the detector can then overlap along the whole route.
template <typename Real>
std::vector<HandshakePath<Real>> handshake_paths(const PathGraph<Real>& g) {
  detail::validate_graph(g);
  int source = -1;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].kind == NodeKind::source) source = int(i);

  std::vector<HandshakePath<Real>> out;
  std::vector<int> stack{source};

  auto emit = [&]() {
    HandshakePath<Real> p;
    p.node_ids = stack;
    bool blocked = false;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      const auto& node = g.nodes[stack[i]];
      p.node_names.push_back(node.name);
      p.positions.push_back(node.pos);
      if (node.kind == NodeKind::blocker) blocked = true;
      if (i > 0) p.length += (node.pos - g.nodes[stack[i - 1]].pos).norm();
    }
    p.open = !blocked;
    out.push_back(std::move(p));
  };

  // iterative DFS over outgoing edges in insertion order (deterministic)
  std::function<void(int)> dfs = [&](int n) {
    if (g.nodes[n].kind == NodeKind::detector) {
      emit();
      return;
    }
    for (const auto& e : g.edges) {
      if (e.from != n) continue;
      stack.push_back(e.to);
      dfs(e.to);
      stack.pop_back();
    }
  };
  dfs(source);
  return out;
}

// Renders the transition amplitude density of the traveling pair along an
// open path. The pair is evaluated in an unfolded 1D arc-length frame
// (retarded state anchored at the source end, advanced state at the
// detector end, t_f - t_i = length/|k|) and mapped to the lab frame
// segment by segment by rigid motion. The envelope center sits at arc
// length |k| (t - t_i) for every t.
template <typename Real>
std::vector<std::pair<Real, ComplexField<Real>>> path_density_snapshots(
    const HandshakePath<Real>& path, Real k, Real s, const std::vector<Real>& times,
    const Grid<Real>& render_grid) {
  using Vec2 = Eigen::Matrix<Real, 2, 1>;
  if (!path.open) throw PathError("path_density_snapshots: path is blocked");
  if (path.positions.size() < 2) throw PathError("path_density_snapshots: degenerate path");
  if (!(k > Real(0)) || !(s > Real(0)))
    throw ParameterError("path_density_snapshots: k and s must be positive");
  if (render_grid.dims() != 2)
    throw ShapeError("path_density_snapshots: requires a 2D render grid");

  const Real t_final = path.length / k;
  for (const Real t : times)
    if (t < Real(0) || t > t_final)
      throw ParameterError("path_density_snapshots: time outside [t_i, t_f]");

  struct Segment {
    Vec2 start;
    Vec2 tangent;
    Real len;
    Real arc0;
  };
  std::vector<Segment> segs;
  Real arc = Real(0);
  for (std::size_t i = 0; i + 1 < path.positions.size(); ++i) {
    const Vec2 d = path.positions[i + 1] - path.positions[i];
    const Real len = d.norm();
    if (len <= Real(0)) continue;
    segs.push_back({path.positions[i], d / len, len, arc});
    arc += len;
  }

  const StateSpec<Real> psi_u =
      traveling_gaussian<Real>({Real(0), Real(0), Real(0)}, {k, Real(0)}, s, Direction::retarded);
  const StateSpec<Real> phi_u = traveling_gaussian<Real>({path.length, Real(0), t_final},
                                                         {k, Real(0)}, s, Direction::advanced);

  std::vector<std::pair<Real, ComplexField<Real>>> snaps;
  for (const Real t : times) {
    ComplexField<Real> rho(render_grid);
    for (Index iy = 0; iy < render_grid.ny(); ++iy) {
      for (Index ix = 0; ix < render_grid.nx(); ++ix) {
        const Vec2 p(render_grid.x(ix), render_grid.y(iy));
        // nearest segment by distance to the (end-extended) segment body
        Real best = std::numeric_limits<Real>::max();
        Real ell = Real(0), eta = Real(0);
        for (std::size_t si = 0; si < segs.size(); ++si) {
          const auto& sg = segs[si];
          const Vec2 rel = p - sg.start;
          const Real along = sg.tangent.dot(rel);
          const Real across = sg.tangent[0] * rel[1] - sg.tangent[1] * rel[0];
          Real overshoot = Real(0);
          if (along < Real(0) && si != 0) overshoot = -along;
          if (along > sg.len && si + 1 != segs.size()) overshoot = along - sg.len;
          const Real d2 = across * across + overshoot * overshoot;
          if (d2 < best) {
            best = d2;
            ell = sg.arc0 + along;
            eta = across;
          }
        }
        const auto a = eval_state(psi_u, {ell, eta, t});
        const auto b = eval_state(phi_u, {ell, eta, t});
        rho.values[render_grid.index(ix, iy)] = b * a;
      }
    }
    snaps.emplace_back(t, std::move(rho));
  }
  return snaps;
}

// Canonical Renninger interferometer: source stub into B1, square arms of
// the given length through M1 (lower) and M2 (upper), recombination at B2,
// detector stubs. Port wiring is calibrated so the balanced instrument
// sends everything to D1. block_upper inserts the blocker D3 halfway
// between B1 and M2.
template <typename Real = double>
struct MziLayout {
  Real arm = Real(800);
  Real source_arm = Real(400);
  Real detector_arm = Real(400);
  bool block_upper = false;
  Real wave_number = Real(0.4);
};

template <typename Real>
PathGraph<Real> make_mzi(const MziLayout<Real>& layout) {
  using Vec2 = Eigen::Matrix<Real, 2, 1>;
  PathGraph<Real> g;
  g.wave_number = layout.wave_number;
  const Real L = layout.arm;

  const int s = g.add_node(NodeKind::source, Vec2(-layout.source_arm, 0), "S");
  const int b1 = g.add_node(NodeKind::beam_splitter, Vec2(0, 0), "B1");
  const int m1 = g.add_node(NodeKind::mirror, Vec2(L, 0), "M1");
  const int m2 = g.add_node(NodeKind::mirror, Vec2(0, L), "M2");
  const int b2 = g.add_node(NodeKind::beam_splitter, Vec2(L, L), "B2");
  const int d1 = g.add_node(NodeKind::detector, Vec2(L + layout.detector_arm, L), "D1");
  const int d2 = g.add_node(NodeKind::detector, Vec2(L, L + layout.detector_arm), "D2");

  g.add_edge(s, b1, 0, 0);
  g.add_edge(b1, m1, 0, 0);  // transmitted, lower arm
  if (layout.block_upper) {
    const int d3 = g.add_node(NodeKind::blocker, Vec2(0, L / Real(2)), "D3");
    g.add_edge(b1, d3, 1, 0);  // reflected, upper arm, absorbed at D3
    g.add_edge(d3, m2, 0, 0);  // geometric continuation, carries no amplitude
  } else {
    g.add_edge(b1, m2, 1, 0);
  }
  g.add_edge(m1, b2, 0, 0);  // arrives from below -> input port 0
  g.add_edge(m2, b2, 0, 1);  // arrives from the left -> input port 1
  g.add_edge(b2, d2, 0, 0);  // +y output
  g.add_edge(b2, d1, 1, 0);  // +x output: all amplitude when balanced
  return g;
}

}  // namespace tsq
