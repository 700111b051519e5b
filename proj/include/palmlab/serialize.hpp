#pragma once

#include <optional>
#include <string>

#include "palmlab/transport.hpp"

namespace palmlab {

// A space together with the measures that ride on it. eta is optional; the
// kernel checkers that need a target measure require it.
struct SpaceBundle {
    SpacePtr space;
    OmegaMeasure P;
    RandomMeasure xi;
    std::optional<RandomMeasure> eta;
};

// Schema "palmlab-space-v1". Element enumeration order is explicit in the
// document and scalars use their canonical text, so round trips are
// bit-exact. Unknown fields are rejected on read.
std::string space_to_json(const SpaceBundle& b);
SpaceBundle space_from_json(const std::string& text);

// Schema "palmlab-kernel-v1": sparse rows as (outcome, source, target, mass)
// quadruples in ascending order. Reading validates against the given space.
std::string kernel_to_json(const TransportKernel& T);
TransportKernel kernel_from_json(const std::string& text, const SpacePtr& space);

}  // namespace palmlab
