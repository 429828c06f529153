// SPDX-License-Identifier: Apache-2.0
// Maps the conventional include path onto the vendored single header.
#pragma once
#include <json.hpp>
