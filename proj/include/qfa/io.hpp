/*
 * Copyright 2025 The qfa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QFA_IO_HPP
#define QFA_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "qfa/factors.hpp"
#include "qfa/fp_core.hpp"

namespace qfa {

// Grammar: <name>(:key=value(,key=value)*)? with names gs | qgs | quadric | sparse | union-cosets | file.
//   gs:p=3,n=4            quadric:p=3,n=3,c=0          sparse:p=3,n=8
//   qgs:p=3,n=6           union-cosets:p=3,n=4,h=1000;0100,reps=0000;0010
//   file:<path>           one member per line as a digit string (coordinate 1 first), optional "p=<prime>",
//                         '#' starts a comment.
// Vector lists use ';' between vectors. ParseError messages carry the 0-based character position.
GroupSubset parse_set_spec(const std::string& text);

// "1200" -> (1,2,0,0) over F_p.
FpVector parse_vector(const std::string& digits, int p, int n = -1);
std::string format_vector(const FpVector& v);

// Factor file: "p n ell q", ell vector lines, q matrices of n rows each, then q shift-vector lines
// for a general factor. Vectors and rows are digit strings or whitespace-separated integers; '#'
// starts a comment.
QuadraticFactor parse_factor(const std::string& text);
QuadraticFactor read_factor_file(const std::string& path);
std::string format_factor(const QuadraticFactor& B);

// Flat key=value lines; '#' comments; later keys overwrite earlier ones.
std::map<std::string, std::string> read_config(const std::string& path);
std::map<std::string, std::string> parse_config(const std::string& text);

}  // namespace qfa

#endif
