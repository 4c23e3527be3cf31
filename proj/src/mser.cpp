// Copyright (c) 2026 The cgdiqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cgdiqa/mser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace cgdiqa {

std::optional<Polarity> parse_polarity(const std::string& s) {
  if (s == "dark-on-light") return Polarity::kDarkOnLight;
  if (s == "light-on-dark") return Polarity::kLightOnDark;
  if (s == "both") return Polarity::kBoth;
  return std::nullopt;
}

std::string to_string(Polarity p) {
  switch (p) {
    case Polarity::kDarkOnLight:
      return "dark-on-light";
    case Polarity::kLightOnDark:
      return "light-on-dark";
    case Polarity::kBoth:
      return "both";
  }
  return "?";
}

void MserParams::validate() const {
  if (delta < 1) throw ContractError("delta must be >= 1");
  if (!(max_variation > 0)) throw ContractError("max_variation must be > 0");
  if (!(min_area > 0)) throw ContractError("min_area must be > 0");
  if (!(max_area_fraction > 0 && max_area_fraction <= 1)) {
    throw ContractError("max_area_fraction must be in (0, 1]");
  }
  if (!(min_aspect > 0 && min_aspect < max_aspect)) {
    throw ContractError("aspect bounds must satisfy 0 < min < max");
  }
}

std::vector<int> ComponentTree::children(int id) const {
  std::vector<int> out;
  for (int c = first_child_.at(id); c != -1; c = next_sibling_[c]) {
    out.push_back(c);
  }
  return out;
}

std::vector<int> ComponentTree::roots() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].parent == -1) out.push_back(i);
  }
  return out;
}

namespace {

// Union-find over pixel indices with per-set region statistics. Only the
// entries of current set representatives are meaningful.
class RegionForest {
 public:
  explicit RegionForest(std::size_t n)
      : parent_(n), rank_(n, 0), area_(n, 0), bbox_(n), node_(n, -1),
        stamp_(n, -1), pending_head_(n, -1), pending_tail_(n, -1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int p) {
    while (parent_[p] != p) {
      parent_[p] = parent_[parent_[p]];
      p = parent_[p];
    }
    return p;
  }

  void make_set(int p, int x, int y) {
    area_[p] = 1;
    bbox_[p] = {x, y, x, y};
  }

  // Moves the set's finished node into its pending-children list the first
  // time the set is modified at `level`. Returns true on that first touch.
  template <class Link>
  bool touch(int r, int level, Link&& append) {
    if (stamp_[r] == level) return false;
    stamp_[r] = level;
    pending_head_[r] = pending_tail_[r] = -1;
    if (node_[r] != -1) append(r, node_[r]);
    node_[r] = -1;
    return true;
  }

  // Returns the surviving representative.
  int unite(int a, int b, std::vector<int>& next_sibling) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    area_[a] += area_[b];
    Box& ba = bbox_[a];
    const Box& bb = bbox_[b];
    ba.x_min = std::min(ba.x_min, bb.x_min);
    ba.y_min = std::min(ba.y_min, bb.y_min);
    ba.x_max = std::max(ba.x_max, bb.x_max);
    ba.y_max = std::max(ba.y_max, bb.y_max);
    if (pending_head_[b] != -1) {
      if (pending_head_[a] == -1) {
        pending_head_[a] = pending_head_[b];
      } else {
        next_sibling[pending_tail_[a]] = pending_head_[b];
      }
      pending_tail_[a] = pending_tail_[b];
    }
    return a;
  }

  void append_pending(int r, int node, std::vector<int>& next_sibling) {
    next_sibling[node] = -1;
    if (pending_head_[r] == -1) {
      pending_head_[r] = node;
    } else {
      next_sibling[pending_tail_[r]] = node;
    }
    pending_tail_[r] = node;
  }

  std::size_t area(int r) const { return area_[r]; }
  const Box& bbox(int r) const { return bbox_[r]; }
  int pending_head(int r) const { return pending_head_[r]; }
  int& node(int r) { return node_[r]; }
  int stamp(int r) const { return stamp_[r]; }

 private:
  std::vector<int> parent_;
  std::vector<std::uint8_t> rank_;
  std::vector<std::size_t> area_;
  std::vector<Box> bbox_;
  std::vector<int> node_;
  std::vector<int> stamp_;
  std::vector<int> pending_head_;
  std::vector<int> pending_tail_;
};

}  // namespace

ComponentTree build_component_tree(const GrayImage& img, Polarity polarity) {
  if (img.empty()) throw ContractError("component tree of an empty image");
  if (polarity == Polarity::kBoth) {
    throw ContractError("build_component_tree needs a single polarity");
  }
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.size();
  const auto px = img.pixels();
  const bool invert = polarity == Polarity::kLightOnDark;
  auto value = [&](std::size_t i) -> int {
    return invert ? 255 - px[i] : px[i];
  };

  // Counting sort of pixel indices by value.
  std::array<std::size_t, 257> start{};
  for (std::size_t i = 0; i < n; ++i) ++start[value(i) + 1];
  for (int v = 0; v < 256; ++v) start[v + 1] += start[v];
  std::vector<int> order(n);
  {
    auto fill = start;
    for (std::size_t i = 0; i < n; ++i) {
      order[fill[value(i)]++] = static_cast<int>(i);
    }
  }

  ComponentTree tree;
  tree.width_ = w;
  tree.height_ = h;
  tree.polarity_ = polarity;

  RegionForest forest(n);
  std::vector<std::uint8_t> added(n, 0);
  std::vector<int> touched;
  auto append = [&](int r, int node) {
    forest.append_pending(r, node, tree.next_sibling_);
  };

  for (int v = 0; v < 256; ++v) {
    if (start[v] == start[v + 1]) continue;
    touched.clear();
    for (std::size_t k = start[v]; k < start[v + 1]; ++k) {
      const int p = order[k];
      const int x = p % w;
      const int y = p / w;
      forest.make_set(p, x, y);
      added[p] = 1;
      forest.touch(p, v, append);
      touched.push_back(p);
      int rp = p;
      const int nbrs[4] = {x > 0 ? p - 1 : -1, x + 1 < w ? p + 1 : -1,
                           y > 0 ? p - w : -1, y + 1 < h ? p + w : -1};
      for (int q : nbrs) {
        if (q < 0 || !added[q]) continue;
        const int rq = forest.find(q);
        if (rq == rp) continue;
        if (forest.touch(rq, v, append)) touched.push_back(rq);
        rp = forest.unite(rp, rq, tree.next_sibling_);
      }
    }
    for (int r : touched) {
      if (forest.find(r) != r || forest.node(r) != -1) continue;
      const int id = static_cast<int>(tree.nodes_.size());
      ExtremalRegion region;
      region.level = v;
      region.area = forest.area(r);
      region.bbox = forest.bbox(r);
      tree.nodes_.push_back(region);
      tree.first_child_.push_back(forest.pending_head(r));
      tree.next_sibling_.push_back(-1);
      for (int c = forest.pending_head(r); c != -1; c = tree.next_sibling_[c]) {
        tree.nodes_[c].parent = id;
      }
      forest.node(r) = id;
    }
  }
  return tree;
}

double compute_variation(const ComponentTree& tree, int node, int delta) {
  const auto& nodes = tree.nodes();
  const ExtremalRegion& r = nodes.at(node);
  const int limit = r.level + delta;
  int up = node;
  while (nodes[up].parent != -1 && nodes[nodes[up].parent].level <= limit) {
    up = nodes[up].parent;
  }
  return static_cast<double>(nodes[up].area - r.area) /
         static_cast<double>(r.area);
}

void assign_variations(ComponentTree& tree, int delta) {
  for (int i = 0; i < static_cast<int>(tree.nodes_.size()); ++i) {
    tree.nodes_[i].variation = compute_variation(tree, i, delta);
  }
}

std::vector<int> select_mser(const ComponentTree& tree,
                             const MserParams& params) {
  params.validate();
  const auto& nodes = tree.nodes();
  const int count = static_cast<int>(nodes.size());
  const double max_area =
      params.max_area_fraction * static_cast<double>(tree.pixel_count());

  // The branch through a node continues into its largest child.
  std::vector<int> main_child(count, -1);
  for (int i = 0; i < count; ++i) {
    const int p = nodes[i].parent;
    if (p == -1) continue;
    const int cur = main_child[p];
    if (cur == -1 || nodes[i].area > nodes[cur].area) main_child[p] = i;
  }

  std::vector<std::uint8_t> alive(count, 0);
  std::vector<int> survivors;
  for (int i = 0; i < count; ++i) {
    const ExtremalRegion& r = nodes[i];
    const double area = static_cast<double>(r.area);
    if (area < params.min_area || area > max_area) continue;
    if (r.variation > params.max_variation) continue;
    if (r.parent != -1 && r.variation > nodes[r.parent].variation) continue;
    if (main_child[i] != -1 && r.variation > nodes[main_child[i]].variation) {
      continue;
    }
    alive[i] = 1;
    survivors.push_back(i);
  }

  // Induced forest on survivors: each survivor hangs under its nearest
  // surviving ancestor. Bottom-up, a survivor replaces the regions kept in its
  // subtree only when it is strictly more stable than all of them.
  std::vector<int> induced_parent(count, -1);
  for (int s : survivors) {
    for (int p = nodes[s].parent; p != -1; p = nodes[p].parent) {
      if (alive[p]) {
        induced_parent[s] = p;
        break;
      }
    }
  }
  std::vector<double> kept_min(count, std::numeric_limits<double>::infinity());
  std::vector<std::vector<int>> kept(count);
  for (int s : survivors) {
    if (nodes[s].variation < kept_min[s]) {
      kept[s].assign(1, s);
      kept_min[s] = nodes[s].variation;
    }
    const int p = induced_parent[s];
    if (p != -1) {
      kept[p].insert(kept[p].end(), kept[s].begin(), kept[s].end());
      kept_min[p] = std::min(kept_min[p], kept_min[s]);
      kept[s].clear();
    }
  }
  std::fill(alive.begin(), alive.end(), 0);
  for (int s : survivors) {
    if (induced_parent[s] == -1) {
      for (int k : kept[s]) alive[k] = 1;
    }
  }

  std::vector<int> out;
  for (int s : survivors) {
    if (alive[s]) out.push_back(s);
  }
  return out;
}

std::vector<CharacterPatch> extract_character_patches(
    const GrayImage& img, const MserParams& params) {
  params.validate();
  std::vector<Polarity> passes;
  if (params.polarity == Polarity::kBoth) {
    passes = {Polarity::kDarkOnLight, Polarity::kLightOnDark};
  } else {
    passes = {params.polarity};
  }
  const double max_area =
      params.max_area_fraction * static_cast<double>(img.size());

  std::vector<CharacterPatch> patches;
  for (Polarity pol : passes) {
    ComponentTree tree = build_component_tree(img, pol);
    assign_variations(tree, params.delta);
    for (int id : select_mser(tree, params)) {
      const Box& b = tree.node(id).bbox;
      const double ratio = static_cast<double>(b.width()) / b.height();
      if (ratio < params.min_aspect || ratio > params.max_aspect) continue;
      const double box_area = static_cast<double>(b.pixel_count());
      if (box_area < params.min_area || box_area > max_area) continue;
      patches.push_back({b});
    }
  }
  std::sort(patches.begin(), patches.end(),
            [](const CharacterPatch& a, const CharacterPatch& b) {
              return std::tie(a.bbox.y_min, a.bbox.x_min, a.bbox.y_max,
                              a.bbox.x_max) < std::tie(b.bbox.y_min,
                                                       b.bbox.x_min,
                                                       b.bbox.y_max,
                                                       b.bbox.x_max);
            });
  patches.erase(std::unique(patches.begin(), patches.end()), patches.end());
  return patches;
}

std::string patches_to_csv(const std::vector<CharacterPatch>& patches) {
  std::ostringstream out;
  for (const auto& p : patches) {
    out << p.bbox.x_min << ',' << p.bbox.y_min << ',' << p.bbox.x_max << ','
        << p.bbox.y_max << '\n';
  }
  return out.str();
}

GrayImage draw_patches(const GrayImage& img,
                       const std::vector<CharacterPatch>& patches) {
  GrayImage out = img;
  for (const auto& p : patches) {
    const Box& b = p.bbox;
    for (int x = b.x_min; x <= b.x_max; ++x) {
      out(x, b.y_min) = 0;
      out(x, b.y_max) = 0;
    }
    for (int y = b.y_min; y <= b.y_max; ++y) {
      out(b.x_min, y) = 0;
      out(b.x_max, y) = 0;
    }
  }
  return out;
}

}  // namespace cgdiqa
