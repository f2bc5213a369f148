#include "ttu/random.hpp"

#include <cmath>
#include <sstream>

namespace ttu {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x7474u};
  return Rng{seq};
}

namespace {

Duration draw_gaussian(const delay::Gaussian& g, Rng& rng) {
  if (g.stddev.count() <= 0) return g.mean.count() < 0 ? Duration{} : g.mean;
  std::normal_distribution<double> dist(static_cast<double>(g.mean.count()),
                                        static_cast<double>(g.stddev.count()));
  const double v = dist(rng);
  return Duration{v <= 0.0 ? 0 : std::llround(v)};
}

}  // namespace

Duration sample(const DelayModel& model, Rng& rng) {
  struct Visitor {
    Rng& rng;
    Duration operator()(const delay::Constant& c) const {
      return c.value.count() < 0 ? Duration{} : c.value;
    }
    Duration operator()(const delay::Uniform& u) const {
      if (u.hi < u.lo) throw Error(Errc::InvalidArgument, "uniform delay with hi < lo");
      std::uniform_int_distribution<std::int64_t> dist(u.lo.count(), u.hi.count());
      const auto v = dist(rng);
      return Duration{v < 0 ? 0 : v};
    }
    Duration operator()(const delay::Gaussian& g) const { return draw_gaussian(g, rng); }
    Duration operator()(const delay::Contaminated& c) const {
      // Both draws always happen so the stream stays aligned across outcomes.
      const Duration base = draw_gaussian(c.base, rng);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      const bool outlier = coin(rng) < c.outlier_prob;
      return outlier ? base + c.outlier_shift : base;
    }
  };
  return std::visit(Visitor{rng}, model);
}

Duration nominal_mean(const DelayModel& model) {
  struct Visitor {
    Duration operator()(const delay::Constant& c) const { return c.value; }
    Duration operator()(const delay::Uniform& u) const {
      return Duration{u.lo.count() + (u.hi.count() - u.lo.count()) / 2};
    }
    Duration operator()(const delay::Gaussian& g) const { return g.mean; }
    Duration operator()(const delay::Contaminated& c) const {
      return c.base.mean +
             Duration{std::llround(c.outlier_prob * static_cast<double>(c.outlier_shift.count()))};
    }
  };
  return std::visit(Visitor{}, model);
}

Duration upper_bound(const DelayModel& model) {
  struct Visitor {
    Duration operator()(const delay::Constant& c) const { return c.value; }
    Duration operator()(const delay::Uniform& u) const { return u.hi; }
    Duration operator()(const delay::Gaussian& g) const {
      return g.stddev.count() == 0 ? g.mean : Duration::max();
    }
    Duration operator()(const delay::Contaminated&) const { return Duration::max(); }
  };
  return std::visit(Visitor{}, model);
}

std::string describe(const DelayModel& model) {
  std::ostringstream os;
  struct Visitor {
    std::ostringstream& os;
    void operator()(const delay::Constant& c) const { os << "constant(" << c.value.count() << ")"; }
    void operator()(const delay::Uniform& u) const {
      os << "uniform(" << u.lo.count() << "," << u.hi.count() << ")";
    }
    void operator()(const delay::Gaussian& g) const {
      os << "gaussian(" << g.mean.count() << "," << g.stddev.count() << ")";
    }
    void operator()(const delay::Contaminated& c) const {
      os << "contaminated(" << c.base.mean.count() << "," << c.base.stddev.count() << ","
         << c.outlier_prob << "," << c.outlier_shift.count() << ")";
    }
  };
  std::visit(Visitor{os}, model);
  return os.str();
}

}  // namespace ttu
