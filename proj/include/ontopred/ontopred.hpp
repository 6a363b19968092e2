#pragma once

#include "ontopred/error.hpp"
#include "ontopred/term.hpp"
#include "ontopred/vocabulary.hpp"
#include "ontopred/rational.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/triple_text.hpp"
#include "ontopred/core_ontology.hpp"
#include "ontopred/rules.hpp"
#include "ontopred/reasoner.hpp"
#include "ontopred/query.hpp"
#include "ontopred/ingest.hpp"
#include "ontopred/events.hpp"
#include "ontopred/predict.hpp"
#include "ontopred/metrics.hpp"
