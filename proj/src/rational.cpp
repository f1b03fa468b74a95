#include "dwlab/rational.hpp"

#include <ostream>

namespace dwlab {

std::string ExtRational::str() const {
  if (infinite_) return "inf";
  if (fin_.denominator() == 1) return std::to_string(fin_.numerator());
  return std::to_string(fin_.numerator()) + "/" + std::to_string(fin_.denominator());
}

std::ostream& operator<<(std::ostream& os, const ExtRational& x) { return os << x.str(); }

}  // namespace dwlab
