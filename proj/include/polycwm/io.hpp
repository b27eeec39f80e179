#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "polycwm/model.hpp"

namespace polycwm {

// CSV with a header naming the columns. `x` and `y` are required; `label`
// (known component, 1-based, blank = unlabeled) and `truth` (reference
// class, 1-based, used only for scoring) are optional. Column order is free.
// Data rows are numbered from 1 in error messages.
Dataset read_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);

// Writes x,y[,label][,truth] in input order with full precision.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace polycwm
