#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levelseg {

using Eigen::Index;

/// Dense H×W scalar field, row-major so .data() walks pixels in scan order.
template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;

/// Pixel-major data block: one row per pixel (scan order), one column per
/// channel. Row-major, so the raw buffer is exactly the interleaved
/// H·W·C layout.
template <typename Scalar>
using DataMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MaskArray = Array2<std::uint8_t>;
using LabelArray = Array2<int>;

using DynStride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;

/// H×W view of a single channel inside a PixelGrid (no copy).
template <typename Scalar>
using ChannelView = Eigen::Map<const Array2<Scalar>, Eigen::Unaligned, DynStride>;
template <typename Scalar>
using ChannelRef = Eigen::Map<Array2<Scalar>, Eigen::Unaligned, DynStride>;

/// Thrown when the level-set update produces non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Dense H×W×C image-like field with finite values.
template <typename Scalar>
struct PixelGrid {
  Index height{0};
  Index width{0};
  Index channels{0};
  DataMatrix<Scalar> data;  // (height*width) x channels

  PixelGrid() = default;

  PixelGrid(Index h, Index w, Index c, Scalar fill) : height(h), width(w), channels(c) {
    check_shape();
    if (!std::isfinite(static_cast<double>(fill)))
      throw std::invalid_argument("PixelGrid: fill value must be finite");
    data.setConstant(height * width, channels, fill);
  }

  PixelGrid(Index h, Index w, Index c, DataMatrix<Scalar> values)
      : height(h), width(w), channels(c), data(std::move(values)) {
    check_shape();
    if (data.rows() != height * width || data.cols() != channels)
      throw std::invalid_argument("PixelGrid: data shape does not match H*W x C");
    if (!data.allFinite()) throw std::invalid_argument("PixelGrid: values must be finite");
  }

  Index pixel_count() const { return height * width; }

  Scalar at(Index y, Index x, Index c) const { return data(y * width + x, c); }
  Scalar& at(Index y, Index x, Index c) { return data(y * width + x, c); }

  ChannelView<Scalar> channel(Index c) const {
    check_channel(c);
    return ChannelView<Scalar>(data.data() + c, height, width,
                               DynStride(width * channels, channels));
  }
  ChannelRef<Scalar> channel(Index c) {
    check_channel(c);
    return ChannelRef<Scalar>(data.data() + c, height, width,
                              DynStride(width * channels, channels));
  }

 private:
  void check_shape() const {
    if (height < 1 || width < 1 || channels < 1)
      throw std::invalid_argument("PixelGrid: dimensions must be >= 1");
  }
  void check_channel(Index c) const {
    if (c < 0 || c >= channels) throw std::invalid_argument("PixelGrid: channel out of range");
  }
};

/// Axis-aligned half-open pixel rectangle [x0,x1) × [y0,y1) with instance id.
struct BoxAnnotation {
  int id{0};
  Index x0{0};
  Index y0{0};
  Index x1{0};
  Index y1{0};

  BoxAnnotation() = default;

  BoxAnnotation(int id_, Index x0_, Index y0_, Index x1_, Index y1_)
      : id(id_), x0(x0_), y0(y0_), x1(x1_), y1(y1_) {
    if (x0 < 0 || y0 < 0 || x0 >= x1 || y0 >= y1)
      throw std::invalid_argument("BoxAnnotation: require 0 <= x0 < x1 and 0 <= y0 < y1");
    if (area() < 4) throw std::invalid_argument("BoxAnnotation: box area must be >= 4 pixels");
  }

  Index width() const { return x1 - x0; }
  Index height() const { return y1 - y0; }
  Index area() const { return width() * height(); }

  template <typename Scalar>
  bool within(const PixelGrid<Scalar>& grid) const {
    return x1 <= grid.width && y1 <= grid.height;
  }

  bool operator==(const BoxAnnotation& other) const {
    return id == other.id && x0 == other.x0 && y0 == other.y0 && x1 == other.x1 && y1 == other.y1;
  }
};

/// Level-set field φ for one instance, defined over its box frame.
template <typename Scalar>
struct LevelSetField {
  BoxAnnotation box;
  Array2<Scalar> phi;  // box.height() x box.width()

  LevelSetField() = default;

  LevelSetField(const BoxAnnotation& b, Array2<Scalar> values) : box(b), phi(std::move(values)) {
    if (phi.rows() != box.height() || phi.cols() != box.width())
      throw std::invalid_argument("LevelSetField: phi shape does not match the box");
    if (!phi.allFinite()) throw std::invalid_argument("LevelSetField: phi must be finite");
  }
};

enum class InitMode { SignedDistance, CenteredRect, Checkerboard };

/// All solver hyperparameters. Defaults: gamma and alpha from the method's
/// stated values, remaining knobs from this project's solver defaults.
struct EvolutionConfig {
  double gamma{1e-4};        // length-term weight
  double lambda1{1.0};       // image data-term weight
  double lambda2{1.0};       // feature data-term weight
  double alpha{3.0};         // box-projection weight
  double delta_t{0.5};       // Euler step size
  int max_iters{500};
  double rel_tol{1e-6};      // relative-objective stopping threshold
  int patience{10};          // consecutive iterations the threshold must hold
  double eps_curv{1e-8};     // regularizer inside the TV square root
  double eps_dice{1e-6};     // dice denominator regularizer
  double feature_sigma{0.1}; // tree-filter decay scale
  InitMode init_mode{InitMode::SignedDistance};
  double init_scale{1.0};    // fraction of the box used to seed phi, in (0,1]

  void validate() const {
    if (!(gamma >= 0)) throw std::invalid_argument("EvolutionConfig: gamma must be >= 0");
    if (!(lambda1 >= 0) || !(lambda2 >= 0))
      throw std::invalid_argument("EvolutionConfig: lambda weights must be >= 0");
    if (!(alpha >= 0)) throw std::invalid_argument("EvolutionConfig: alpha must be >= 0");
    if (!(delta_t > 0)) throw std::invalid_argument("EvolutionConfig: delta_t must be > 0");
    if (max_iters < 1) throw std::invalid_argument("EvolutionConfig: max_iters must be >= 1");
    if (!(rel_tol > 0)) throw std::invalid_argument("EvolutionConfig: rel_tol must be > 0");
    if (patience < 1) throw std::invalid_argument("EvolutionConfig: patience must be >= 1");
    if (!(eps_curv > 0)) throw std::invalid_argument("EvolutionConfig: eps_curv must be > 0");
    if (!(eps_dice > 0)) throw std::invalid_argument("EvolutionConfig: eps_dice must be > 0");
    if (!(feature_sigma > 0))
      throw std::invalid_argument("EvolutionConfig: feature_sigma must be > 0");
    if (!(init_scale > 0) || init_scale > 1.0)
      throw std::invalid_argument("EvolutionConfig: init_scale must be in (0,1]");
  }
};

/// Binary instance mask in the full-image frame plus its optimization record.
template <typename Scalar>
struct InstanceMask {
  int id{0};
  BoxAnnotation box;
  MaskArray mask;                          // H x W, zeros outside box
  std::vector<Scalar> energy_trajectory;   // total objective after each iteration
  Index iterations_run{0};

  InstanceMask() = default;

  InstanceMask(int id_, const BoxAnnotation& box_, MaskArray m, std::vector<Scalar> trajectory)
      : id(id_),
        box(box_),
        mask(std::move(m)),
        energy_trajectory(std::move(trajectory)),
        iterations_run(static_cast<Index>(energy_trajectory.size())) {
    if (mask.rows() < box.y1 || mask.cols() < box.x1)
      throw std::invalid_argument("InstanceMask: mask frame smaller than the box");
    for (Index y = 0; y < mask.rows(); ++y)
      for (Index x = 0; x < mask.cols(); ++x) {
        const std::uint8_t v = mask(y, x);
        if (v > 1) throw std::invalid_argument("InstanceMask: mask values must be 0 or 1");
        const bool inside = x >= box.x0 && x < box.x1 && y >= box.y0 && y < box.y1;
        if (v == 1 && !inside)
          throw std::invalid_argument("InstanceMask: mask must be zero outside the box");
      }
  }

  Index pixel_count() const { return (mask.cast<int>() == 1).count(); }
};

/// Grid of the stated shape with every value equal to fill.
template <typename Scalar>
PixelGrid<Scalar> make_grid(Index height, Index width, Index channels, Scalar fill) {
  return PixelGrid<Scalar>(height, width, channels, fill);
}

/// Copy of the grid restricted to the box interior.
template <typename Scalar>
PixelGrid<Scalar> crop(const PixelGrid<Scalar>& grid, const BoxAnnotation& box) {
  if (!box.within(grid)) throw std::invalid_argument("crop: box exceeds grid bounds");
  DataMatrix<Scalar> values(box.area(), grid.channels);
  for (Index y = 0; y < box.height(); ++y)
    values.middleRows(y * box.width(), box.width()) =
        grid.data.middleRows((box.y0 + y) * grid.width + box.x0, box.width());
  return PixelGrid<Scalar>(box.height(), box.width(), grid.channels, std::move(values));
}

}  // namespace levelseg
