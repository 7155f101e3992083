#pragma once

#include <iosfwd>
#include <string>

#include "binlot/dist.hpp"

namespace binlot {

// Text format for laws, whitespace separated, '#' starts a comment:
//
//   dist <K>
//   <K masses>
//
//   joint <c> <s0> <s1> ... <s_{c-1}>
//   <s0*s1*...*s_{c-1} masses in C order, last coordinate fastest>
//
// "joint" declares c coordinates: coordinate 0 is the side-information
// source X_0, coordinates 1..c-1 the extracted sources.  "dist" declares a
// single source; it loads as a joint law with a constant side-information
// coordinate (sizes 1, K).
JointDist read_joint(std::istream& in);
JointDist read_joint_file(const std::string& path);

void write_joint(std::ostream& out, const JointDist& j);

}  // namespace binlot
