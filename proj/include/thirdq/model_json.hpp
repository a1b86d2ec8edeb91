#pragma once

// Model files: {"modes", "h", "delta", "alpha", "jumps": [{"v","w","beta"}]}
// plus optional "counting": {"mode", "gamma"} and "symmetries":
// {"unitary": [{"name","P"}], "pt": [{"name","P"}]}. Complex entries are
// [re, im] pairs; a bare number is read as real.

#include <optional>
#include <string>
#include <vector>

#include "thirdq/fock_oracle.hpp"
#include "thirdq/lindblad_model.hpp"

namespace thirdq {

struct NamedCandidate {
  std::string name;
  ComplexMatrix P;
};

struct ModelFile {
  LindbladModel model;
  std::optional<PhotonCounting> counting;
  std::vector<NamedCandidate> unitary;
  std::vector<NamedCandidate> pt;
};

/// Throws Error(InvalidInput / DimensionMismatch) with the JSON path as context.
ModelFile parse_model_text(const std::string& text);

ModelFile load_model_file(const std::string& path);

}  // namespace thirdq
