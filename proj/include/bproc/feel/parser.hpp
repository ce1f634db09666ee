// Copyright 2026 The bproc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

#include "bproc/feel/ast.hpp"

namespace bproc::feel {

// Parses one expression of the supported subset (grammar in docs/feel.md).
// Throws SyntaxError with a 1-based column and the expected-token set.
ExprPtr parseExpr(std::string_view text);

// Renders an AST back to source. parseExpr(render(e)) is structurally equal
// to e for every tree the parser can produce.
std::string render(const Expr& e);
inline std::string render(const ExprPtr& e) { return render(*e); }

}  // namespace bproc::feel
