/*
 * Copyright 2026 The sprsm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

namespace sprsm
{
/// Counter-based generator: the i-th draw of a stream is a pure function of
/// (seed, stream, i), so instances are reproducible regardless of the order
/// in which entries are filled. Mixing is SplitMix64's finalizer.
class CounterRng
{
   public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t bits(std::uint64_t i) const;
    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t i) const;
    /// Standard normal by Box-Muller on uniforms (2i, 2i+1).
    double normal(std::uint64_t i) const;

   private:
    std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sprsm
