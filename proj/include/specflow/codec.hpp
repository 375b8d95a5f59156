// Copyright 2026 The Specflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON forms of the value types that cross the event log, the HTTP API and
// the C API. Field order is fixed.

#include "json.hpp"
#include "specflow/agent_gateway.hpp"
#include "specflow/context_store.hpp"
#include "specflow/data_store.hpp"
#include "specflow/error.hpp"
#include "specflow/quality_gates.hpp"

namespace specflow {

using ojson = nlohmann::ordered_json;

ojson to_json(const Diagnostic& d);
Diagnostic diagnostic_from_json(const ojson& j);

ojson to_json(const GateResult& g);
GateResult gate_result_from_json(const ojson& j);

ojson to_json(const Change& c);
Change change_from_json(const ojson& j);
ojson to_json(const ChangeSet& changes);
ChangeSet change_set_from_json(const ojson& j);

ojson to_json(const ArtifactRecord& r);
ojson to_json(const LineageTrace& t);
ojson to_json(const IntegrityReport& r);
ojson to_json(const SearchHit& h);
ojson to_json(const CheckRun& r);

ojson error_json(ErrorCode code, std::string_view message);

/// Serializes with invalid UTF-8 replaced instead of throwing.
std::string dump_json(const ojson& j, int indent = -1);

}  // namespace specflow
