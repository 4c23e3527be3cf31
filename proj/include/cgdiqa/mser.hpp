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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgdiqa/image.hpp"

namespace cgdiqa {

enum class Polarity {
  kDarkOnLight,  ///< components of {p : img(p) <= t}
  kLightOnDark,  ///< same on the inverted image
  kBoth,
};

std::optional<Polarity> parse_polarity(const std::string& s);
std::string to_string(Polarity p);

struct MserParams {
  int delta = 5;
  double max_variation = 0.2;
  double min_area = 13;
  double max_area_fraction = 0.001;
  double min_aspect = 0.25;
  double max_aspect = 4.0;
  Polarity polarity = Polarity::kDarkOnLight;

  /// Throws ContractError naming the first violated bound.
  void validate() const;
};

/// One node of the component tree: a connected component of a threshold set,
/// recorded at the lowest threshold at which that exact pixel set exists.
struct ExtremalRegion {
  int level = 0;
  std::size_t area = 0;
  Box bbox;
  double variation = 0.0;
  int parent = -1;  ///< index in ComponentTree::nodes(), -1 for roots
};

/// Nesting forest of extremal regions. Nodes are stored children-first: every
/// node appears before its parent.
class ComponentTree {
 public:
  const std::vector<ExtremalRegion>& nodes() const noexcept { return nodes_; }
  const ExtremalRegion& node(int id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Children of `id`, in creation order.
  std::vector<int> children(int id) const;
  std::vector<int> roots() const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  Polarity polarity() const noexcept { return polarity_; }

 private:
  friend ComponentTree build_component_tree(const GrayImage&, Polarity);
  friend void assign_variations(ComponentTree&, int);

  std::vector<ExtremalRegion> nodes_;
  std::vector<int> first_child_;
  std::vector<int> next_sibling_;
  int width_ = 0;
  int height_ = 0;
  Polarity polarity_ = Polarity::kDarkOnLight;
};

/// Builds the 4-connected component tree with union-find. `polarity` must be
/// dark-on-light or light-on-dark. Variations are left at 0; see
/// assign_variations.
ComponentTree build_component_tree(const GrayImage& img, Polarity polarity);

/// (|R'| - |R|) / |R|, where R' is the component at threshold level + delta
/// containing R: the largest ancestor-or-self whose level <= level + delta.
double compute_variation(const ComponentTree& tree, int node, int delta);

/// Fills ExtremalRegion::variation for every node.
void assign_variations(ComponentTree& tree, int delta);

/// Indices of stable regions: local variation minima on their branch, within
/// max_variation and the area range, after nested duplicate suppression.
/// Variations must already be assigned.
std::vector<int> select_mser(const ComponentTree& tree,
                             const MserParams& params);

struct CharacterPatch {
  Box bbox;
  friend auto operator<=>(const CharacterPatch&, const CharacterPatch&) =
      default;
};

/// Full detector: tree per polarity, selection, bounding boxes, aspect and
/// box-area filters, de-duplication. Result sorted by (y_min, x_min, ...).
std::vector<CharacterPatch> extract_character_patches(const GrayImage& img,
                                                      const MserParams& params);

/// CSV lines `x_min,y_min,x_max,y_max`.
std::string patches_to_csv(const std::vector<CharacterPatch>& patches);

/// Copy of `img` with each box outline drawn at luminance 0.
GrayImage draw_patches(const GrayImage& img,
                       const std::vector<CharacterPatch>& patches);

}  // namespace cgdiqa
