#pragma once

#include <doctest.h>

#include "barcodelab/error.hpp"

// Runs `expr` and checks it throws barcodelab::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected_code)                              \
  do {                                                                     \
    bool threw_ = false;                                                   \
    try {                                                                  \
      (void)(expr);                                                        \
    } catch (const barcodelab::Error& e_) {                                \
      threw_ = true;                                                       \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());              \
    }                                                                      \
    CHECK_MESSAGE(threw_, "expected barcodelab::Error from " #expr);       \
  } while (false)
