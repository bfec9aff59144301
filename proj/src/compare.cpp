#include "mmcoord/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmcoord {

CommunitySet CommunitySet::from_partition(const Partition& p, std::string approach) {
  CommunitySet out;
  out.approach = std::move(approach);
  const auto comms = p.communities();
  for (CommunityId c = 0; c < comms.size(); ++c) {
    if (comms[c].empty()) continue;
    out.ids.push_back(c);
    out.members.push_back(comms[c]);
  }
  return out;
}

CommunitySet CommunitySet::larger_than(std::size_t min_size) const {
  CommunitySet out;
  out.approach = approach;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].size() > min_size) {
      out.ids.push_back(ids[i]);
      out.members.push_back(members[i]);
    }
  }
  return out;
}

namespace {

std::size_t intersection_size(const Members& a, const Members& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double harmonic_overlap(const Members& a, const Members& b) {
  const std::size_t inter = intersection_size(a, b);
  if (inter == 0) return 0.0;
  // 2 r_ab r_ba / (r_ab + r_ba) with r_ab = inter/|a|, r_ba = inter/|b|
  // simplifies to 2 inter / (|a| + |b|), which is exactly 1 iff a == b.
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

OverlapMatrix overlap_matrix(const CommunitySet& a, const CommunitySet& b, std::size_t min_size) {
  OverlapMatrix o;
  o.a = a.larger_than(min_size);
  o.b = b.larger_than(min_size);
  o.cells.assign(o.rows() * o.cols(), 0.0);
  for (std::size_t r = 0; r < o.rows(); ++r) {
    for (std::size_t c = 0; c < o.cols(); ++c) o.cells[r * o.cols() + c] = harmonic_overlap(o.a.members[c], o.b.members[r]);
  }
  return o;
}

std::vector<int> max_weight_assignment(const std::vector<double>& score, std::size_t rows, std::size_t cols) {
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  // Square cost matrix, 1-based as in the classic potentials formulation.
  auto cost = [&](std::size_t i, std::size_t j) -> double {
    if (i > rows || j > cols) return 0.0;
    return -score[(i - 1) * cols + (j - 1)];
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] >= 1 && p[j] <= rows && j <= cols) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

MatchResult hungarian_match(const OverlapMatrix& o) {
  // Solve with A as rows: score[i][j] = o_ij.
  const std::size_t k = o.cols();
  const std::size_t kp = o.rows();
  std::vector<double> score(k * kp);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < kp; ++j) score[i * kp + j] = o.overlap(i, j);
  }
  const auto assignment = max_weight_assignment(score, k, kp);
  MatchResult m;
  std::vector<char> b_used(kp, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (assignment[i] < 0) {
      m.unmatched_a.push_back(i);
      continue;
    }
    const auto j = static_cast<std::size_t>(assignment[i]);
    m.pairs.emplace_back(i, j);
    b_used[j] = 1;
    m.total += o.overlap(i, j);
  }
  for (std::size_t j = 0; j < kp; ++j) {
    if (!b_used[j]) m.unmatched_b.push_back(j);
  }
  return m;
}

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Lost: return "lost";
    case Label::Common: return "common";
    case Label::Gained: return "gained";
  }
  return "?";
}

std::size_t CommunityLabels::lost() const { return static_cast<std::size_t>(std::count(a.begin(), a.end(), Label::Lost)); }
std::size_t CommunityLabels::common_a() const {
  return static_cast<std::size_t>(std::count(a.begin(), a.end(), Label::Common));
}
std::size_t CommunityLabels::common_b() const {
  return static_cast<std::size_t>(std::count(b.begin(), b.end(), Label::Common));
}
std::size_t CommunityLabels::gained() const {
  return static_cast<std::size_t>(std::count(b.begin(), b.end(), Label::Gained));
}

CommunityLabels label_communities(const OverlapMatrix& o, const MatchResult& m, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must be in [0, 1]");
  CommunityLabels out;
  out.theta = theta;
  out.a.assign(o.cols(), Label::Lost);
  out.b.assign(o.rows(), Label::Gained);
  for (const auto& [i, j] : m.pairs) {
    if (o.overlap(i, j) >= theta) {
      out.a[i] = Label::Common;
      out.b[j] = Label::Common;
    }
  }
  return out;
}

std::map<ActorId, Label> label_nodes(const CommunitySet& a, const CommunitySet& b, const MatchResult& m) {
  auto owner = [](const CommunitySet& s, const char* side) {
    std::map<ActorId, std::size_t> out;
    for (std::size_t c = 0; c < s.size(); ++c) {
      for (const auto v : s.members[c]) {
        if (!out.emplace(v, c).second) {
          throw DataError(std::string("node belongs to two communities on side ") + side);
        }
      }
    }
    return out;
  };
  const auto in_a = owner(a, "A");
  const auto in_b = owner(b, "B");
  std::vector<std::optional<std::size_t>> partner_of_a(a.size()), partner_of_b(b.size());
  for (const auto& [i, j] : m.pairs) {
    partner_of_a[i] = j;
    partner_of_b[j] = i;
  }

  std::map<ActorId, Label> labels;
  auto classify = [&](ActorId v) {
    const auto ia = in_a.find(v);
    const auto ib = in_b.find(v);
    const std::optional<std::size_t> ca = ia == in_a.end() ? std::nullopt : std::optional(ia->second);
    const std::optional<std::size_t> cb = ib == in_b.end() ? std::nullopt : std::optional(ib->second);
    if (ca && partner_of_a[*ca] && cb && *partner_of_a[*ca] == *cb) return Label::Common;
    if (ca && partner_of_a[*ca]) return Label::Lost;
    if (cb && partner_of_b[*cb]) return Label::Gained;
    if (ca) return Label::Lost;
    return Label::Gained;
  };
  for (const auto& [v, c] : in_a) labels.emplace(v, classify(v));
  for (const auto& [v, c] : in_b) labels.emplace(v, classify(v));
  return labels;
}

double nmi(const Partition& p1, const Partition& p2, std::size_t min_size) {
  auto kept = [min_size](const Partition& p) {
    std::map<CommunityId, std::size_t> size;
    for (const auto& [v, c] : p.assignment) ++size[c];
    std::map<ActorId, CommunityId> out;
    for (const auto& [v, c] : p.assignment) {
      if (size[c] > min_size) out.emplace(v, c);
    }
    return out;
  };
  const auto x = kept(p1);
  const auto y = kept(p2);
  std::map<std::pair<CommunityId, CommunityId>, double> joint;
  std::map<CommunityId, double> mx, my;
  double n = 0.0;
  for (const auto& [v, cx] : x) {
    const auto it = y.find(v);
    if (it == y.end()) continue;
    joint[{cx, it->second}] += 1.0;
    mx[cx] += 1.0;
    my[it->second] += 1.0;
    n += 1.0;
  }
  if (n == 0.0) throw DataError("NMI over an empty common node universe");
  auto entropy = [n](const std::map<CommunityId, double>& m) {
    double h = 0.0;
    for (const auto& [c, cnt] : m) h -= cnt / n * std::log(cnt / n);
    return h;
  };
  const double hx = entropy(mx);
  const double hy = entropy(my);
  if (hx + hy <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, cnt] : joint) {
    mi += cnt / n * std::log(cnt * n / (mx[key.first] * my[key.second]));
  }
  return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

double actor_coverage(const MultiplexNetwork& net, Action layer_i, Action layer_j) {
  const auto& vi = net.layer(layer_i).nodes;
  const auto& vj = net.layer(layer_j).nodes;
  if (vi.empty()) throw DataError("actor coverage from an empty layer");
  std::size_t common = 0;
  for (const auto v : vi) common += vj.count(v);
  return static_cast<double>(common) / static_cast<double>(vi.size());
}

double edge_coverage(const MultiplexNetwork& net, Action layer_i, Action layer_j) {
  const auto& ei = net.layer(layer_i).edges;
  const auto& ej = net.layer(layer_j).edges;
  if (ei.empty()) throw DataError("edge coverage from a layer without edges");
  std::size_t common = 0;
  for (const auto& [key, attr] : ei) common += ej.count(key);
  return static_cast<double>(common) / static_cast<double>(ei.size());
}

std::optional<double> pearson_degree_correlation(const MultiplexNetwork& net, Action layer_i, Action layer_j) {
  const auto& gi = net.layer(layer_i);
  const auto& gj = net.layer(layer_j);
  std::map<ActorId, double> di, dj;
  for (const auto& [key, attr] : gi.edges) {
    di[key.a] += 1.0;
    di[key.b] += 1.0;
  }
  for (const auto& [key, attr] : gj.edges) {
    dj[key.a] += 1.0;
    dj[key.b] += 1.0;
  }
  std::vector<double> x, y;
  for (const auto v : gi.nodes) {
    if (!gj.nodes.count(v)) continue;
    x.push_back(di[v]);
    y.push_back(dj[v]);
  }
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mmcoord
