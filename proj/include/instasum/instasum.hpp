#pragma once

#include "instasum/abstractive.hpp"
#include "instasum/config.hpp"
#include "instasum/corpus.hpp"
#include "instasum/corpus_io.hpp"
#include "instasum/error.hpp"
#include "instasum/evaluation.hpp"
#include "instasum/extractive.hpp"
#include "instasum/pipeline.hpp"
#include "instasum/preprocess.hpp"
#include "instasum/review_service.hpp"
#include "instasum/selector.hpp"
#include "instasum/similarity.hpp"
#include "instasum/summary.hpp"
