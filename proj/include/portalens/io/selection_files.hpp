#pragma once

// Query files for `portalens select`.
//
//   PORTALENS-TUBE v1
//   radius<TAB>r
//   x<TAB>y<TAB>z            one control point per line, data units
//
//   PORTALENS-LASSOS v1
//   camera<TAB>fov<TAB>near<TAB>far<TAB>width<TAB>height     optional, first
//   LASSO<TAB>device pose (px py pz qw qx qy qz)<TAB>anchor (px py pz qw qx qy qz scale)<TAB>n
//   x<TAB>y                  n polygon vertices, pixels
//
// Several LASSO blocks form an intersection query.

#include "portalens/selection.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace portalens {

TubeSelector read_tube(std::istream& in);
std::vector<LassoVolume> read_lassos(std::istream& in);

} // namespace portalens
