// Generator alphabets in a structured text config.
//
// Schema (JSON):
//   {"generators": [
//      {"kind": "rotation", "angle": 0.25},
//      {"kind": "moebius",  "matrix": [[2.0, 0.0], [0.0, 0.5]]},
//      {"kind": "trig",     "offset": 0.0, "amplitude": 0.3}
//   ]}
// Unknown keys are rejected.
#pragma once

#include <string>

#include "circlelab/word.hpp"

namespace circlelab {

IndexedAlphabet load_alphabet(const std::string& json_text,
                              const Tolerances& tol = default_tolerances());
IndexedAlphabet load_alphabet_file(const std::string& path,
                                   const Tolerances& tol = default_tolerances());
std::string save_alphabet(const IndexedAlphabet& alphabet);

} // namespace circlelab
