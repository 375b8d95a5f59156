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

// Templates for a fresh project.

#include <system_error>

#include "specflow/error.hpp"
#include "specflow/project.hpp"
#include "specflow/workspace.hpp"

namespace specflow {

namespace fs = std::filesystem;

namespace {

const char* const kRawDataAnalysis = R"(---
name: raw-data-analysis
category: academic
description: Inspect the raw data and summarize its structure
inputs: [docs/01-basic-information.md, data/raw/]
outputs: [docs/02-raw-data-analysis.md]
context_target: docs/02-raw-data-analysis.md
---
# Raw data analysis

Read the project description in docs/01-basic-information.md and every file
under data/raw/. Report, per file: shape, column types, missing values,
value ranges and obvious outliers. Note anything that needs cleaning.

Write the summary to docs/02-raw-data-analysis.md. Do not modify data/raw/.
)";

const char* const kPreprocess = R"(---
name: preprocess
category: academic
description: Design and execute preprocessing
inputs: [docs/01-basic-information.md, docs/02-raw-data-analysis.md, data/raw/]
outputs: [scripts/preprocess.py, docs/03-preprocess-plan.md]
context_target: docs/03-preprocess-plan.md
---
# Preprocessing

Using the findings in docs/02-raw-data-analysis.md, decide how to clean,
encode and split the data. Write the plan and its rationale to
docs/03-preprocess-plan.md and implement it as scripts/preprocess.py, which
reads data/raw/ and writes data/processed/.
)";

const char* const kResearchPlan = R"(---
name: research-plan
category: academic
description: Formulate the integrated study plan
inputs: [docs/01-basic-information.md, docs/02-raw-data-analysis.md, docs/03-preprocess-plan.md]
outputs: [docs/05-research-plan.md]
context_target: docs/05-research-plan.md
---
# Research plan

State the research questions, candidate models, baselines, evaluation
metrics and validation protocol. Be specific enough that the plan can be
implemented without further questions. Write it to docs/05-research-plan.md.
)";

const char* const kCodeImplementation = R"(---
name: code-implementation
category: academic
description: Implement and validate analysis code
inputs: [docs/03-preprocess-plan.md, docs/05-research-plan.md]
outputs: [src/*.py, scripts/run_experiment.py, docs/06-implementation-log.md]
context_target: docs/06-implementation-log.md
---
# Code implementation

Implement the models and evaluation described in docs/05-research-plan.md as
Python modules under src/, plus scripts/run_experiment.py as the entry
point. Type-annotate everything; the configured quality gates must pass.
Log design choices and deviations in docs/06-implementation-log.md.
)";

const char* const kRunExperiments = R"(---
name: run-experiments
category: academic
description: Execute experimental pipelines
inputs: [scripts/preprocess.py, scripts/run_experiment.py, src/*.py, data/raw/]
outputs: [data/processed/, data/output/]
---
# Run experiments

Run scripts/preprocess.py, then scripts/run_experiment.py. Store processed
datasets under data/processed/ and models, figures and metrics under
data/output/ (metrics in data/output/results/). Declare every derived file
with its sources and the document that describes the transformation.
)";

const char* const kExperimentAnalysis = R"(---
name: experiment-analysis
category: academic
description: Analyze and record results
inputs: [data/output/results/, docs/05-research-plan.md]
outputs: [docs/08-experiment-analysis.md, docs/09-experiment-report.md]
context_target: docs/09-experiment-report.md
---
# Experiment analysis

Interpret the metrics in data/output/results/ against the plan in
docs/05-research-plan.md. Put the detailed analysis in
docs/08-experiment-analysis.md and a concise report with the key tables in
docs/09-experiment-report.md.
)";

const char* const kResearchReport = R"(---
name: research-report
category: academic
description: Generate a publication-ready manuscript
inputs: [docs/08-experiment-analysis.md, docs/09-experiment-report.md]
outputs: [docs/10-research-report.md]
context_target: docs/10-research-report.md
---
# Research report

Consolidate the project documents into a manuscript: abstract,
introduction, data, methods, results, discussion and limitations. Say which
stages were skipped, if any. Write it to docs/10-research-report.md.
)";

const char* const kGradioApp = R"(---
name: gradio-app
category: academic
description: Deploy a model interface
inputs: [docs/09-experiment-report.md, src/*.py, data/output/]
outputs: [src/gradio_app.py, docs/11-gradio-deployment.md]
context_target: docs/11-gradio-deployment.md
---
# Model interface

Build a small Gradio app in src/gradio_app.py that loads the trained model
from data/output/ and serves predictions. Document how to run it in
docs/11-gradio-deployment.md.
)";

const char* const kWorkflow = R"(# Research workflow

Each stage names a command file under commands/, the context document it
writes, and what it reads and produces. The order is a recommendation:
stages can be skipped or repeated.

## Workflow

- @raw-data-analysis.md - inspect raw data in `data/raw/`
  context: docs/02-raw-data-analysis.md
  consumes: [docs/01-basic-information.md, data/raw/]
- @preprocess.md - design and execute preprocessing
  context: docs/03-preprocess-plan.md
  consumes: [docs/01-basic-information.md, docs/02-raw-data-analysis.md, data/raw/]
  produces: [scripts/preprocess.py]
- @research-plan.md - formulate the integrated study plan
  context: docs/05-research-plan.md
  consumes: [docs/01-basic-information.md, docs/02-raw-data-analysis.md]
- @code-implementation.md - implement and validate analysis code
  context: docs/06-implementation-log.md
  consumes: [docs/03-preprocess-plan.md, docs/05-research-plan.md]
  produces: [src/*.py, scripts/run_experiment.py]
- @run-experiments.md - execute experimental pipelines
  consumes: [scripts/run_experiment.py, scripts/preprocess.py, data/raw/]
  produces: [data/processed/, data/output/, data/output/results/]
- @experiment-analysis.md - analyze and record results
  context: docs/09-experiment-report.md
  consumes: [data/output/results/, docs/05-research-plan.md]
  produces: [docs/08-experiment-analysis.md]
- @research-report.md - generate a publication-ready manuscript
  context: docs/10-research-report.md
  consumes: [docs/08-experiment-analysis.md, docs/09-experiment-report.md]
- @gradio-app.md - deploy model interface (optional)
  context: docs/11-gradio-deployment.md
  consumes: [docs/09-experiment-report.md, src/*.py, data/output/]
  produces: [src/gradio_app.py]
)";

const char* const kBasicInformation = R"(# Basic information

## Project

Title:

Objectives:

## Data sources

Put the raw data files under data/raw/. They are registered on the first
run and treated as read-only from then on.

## Constraints

)";

}  // namespace

std::vector<std::pair<std::string, std::string>> canonical_command_files() {
  return {
      {"raw-data-analysis", kRawDataAnalysis},     {"preprocess", kPreprocess},
      {"research-plan", kResearchPlan},            {"code-implementation", kCodeImplementation},
      {"run-experiments", kRunExperiments},        {"experiment-analysis", kExperimentAnalysis},
      {"research-report", kResearchReport},        {"gradio-app", kGradioApp},
  };
}

std::string canonical_workflow_doc() { return kWorkflow; }

std::vector<std::string> scaffold(const fs::path& root) {
  std::error_code ec;
  if (fs::exists(root, ec)) {
    if (!fs::is_directory(root, ec)) fail(ErrorCode::NonEmptyTarget, root.string() + " exists and is not a directory");
    if (!fs::is_empty(root, ec)) fail(ErrorCode::NonEmptyTarget, root.string() + " is not empty");
  }
  fs::create_directories(root, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + root.string() + ": " + ec.message());

  std::vector<std::string> created;
  for (const char* dir : {"data/raw/", "data/processed/", "data/output/", "docs/", "src/", "scripts/", "commands/"}) {
    fs::create_directories(root / dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + std::string(dir) + ": " + ec.message());
    created.emplace_back(dir);
  }
  auto put = [&](const std::string& rel, const std::string& content) {
    write_text_file(root / rel, content);
    created.push_back(rel);
  };
  for (const auto& [name, content] : canonical_command_files()) put("commands/" + name + ".md", content);
  put("WORKFLOW.md", kWorkflow);
  put("docs/01-basic-information.md", kBasicInformation);
  put(std::string(kConfigFile), ProjectConfig::defaults().to_json().dump(2) + "\n");
  return created;
}

}  // namespace specflow
