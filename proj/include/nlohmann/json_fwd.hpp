// SPDX-License-Identifier: Apache-2.0
// The vendored single header has no separate forward-declaration file.
#pragma once
#include <json.hpp>
