#pragma once

#include <string>

#include <doctest.h>

#include "dkg/error.hpp"

// Run `expr` and check that it throws dkg::Error with `expected`.
#define CHECK_THROWS_CODE(expr, expected)                                   \
    do {                                                                    \
        bool dkg_thrown = false;                                            \
        try {                                                               \
            (void)(expr);                                                   \
        } catch (const ::dkg::Error& dkg_e) {                               \
            dkg_thrown = true;                                              \
            CHECK_MESSAGE(dkg_e.code() == (expected), std::string(::dkg::to_string(dkg_e.code()))); \
        }                                                                   \
        CHECK_MESSAGE(dkg_thrown, "expected " << std::string(::dkg::to_string(expected))); \
    } while (false)
