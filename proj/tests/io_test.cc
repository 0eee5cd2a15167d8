// Copyright 2026 The depbound Authors
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

#include <gtest/gtest.h>

#include <sstream>

#include "depbound/io.h"

namespace depbound {
namespace {

LoadedData Read(const std::string& outcomes, const std::string* edges = nullptr) {
  std::istringstream o(outcomes);
  if (edges == nullptr) return ReadObservedData(o, nullptr);
  std::istringstream e(*edges);
  return ReadObservedData(o, &e);
}

int LineOf(const std::string& outcomes, const std::string* edges = nullptr) {
  try {
    Read(outcomes, edges);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(ReadObservedData, MapsIdsToIndicesInFileOrder) {
  const std::string edges = "id_i,id_j\nc,a\n";
  const LoadedData d = Read("id,x,d\nc,1.5,2\na,-2,1\nb,0,0\n", &edges);
  EXPECT_TRUE(d.degrees_present);
  EXPECT_EQ(d.data.outcomes, (std::vector<double>{1.5, -2, 0}));
  EXPECT_EQ(d.data.degrees, (std::vector<std::int64_t>{2, 1, 0}));
  ASSERT_EQ(d.data.observed_edges.size(), 1u);
  EXPECT_EQ(d.data.observed_edges[0], VertexPair(0, 1));
  EXPECT_EQ(d.data.label(0), "c");
}

TEST(ReadObservedData, ColumnsInAnyOrderAndTabs) {
  const LoadedData d = Read("x\tid\td\n3\tv1\t4\n");
  EXPECT_EQ(d.data.outcomes, (std::vector<double>{3}));
  EXPECT_EQ(d.data.degrees, (std::vector<std::int64_t>{4}));
  EXPECT_EQ(d.data.label(0), "v1");
}

TEST(ReadObservedData, DegreesAboveNMinusOneAreKept) {
  EXPECT_EQ(Read("id,x,d\n1,0,100\n2,1,7\n").data.degrees, (std::vector<std::int64_t>{100, 7}));
}

TEST(ReadObservedData, MissingDegreeColumnAppliesGlobalBoundWithWarning) {
  const LoadedData d = Read("id,x\n1,0\n2,1\n3,1\n");
  EXPECT_FALSE(d.degrees_present);
  EXPECT_EQ(d.data.degrees, (std::vector<std::int64_t>{2, 2, 2}));
  EXPECT_FALSE(d.warnings.empty());
}

TEST(ReadObservedData, MissingEdgesFileEqualsEmptyEdgesFile) {
  const std::string empty = "id_i,id_j\n";
  const LoadedData a = Read("id,x,d\n1,0,1\n2,1,1\n");
  const LoadedData b = Read("id,x,d\n1,0,1\n2,1,1\n", &empty);
  EXPECT_EQ(a.data.observed_edges, b.data.observed_edges);
  EXPECT_EQ(a.data.outcomes, b.data.outcomes);
}

TEST(ReadObservedData, DuplicateEdgesDroppedWithWarning) {
  const std::string edges = "id_i,id_j\n1,2\n2,1\n";
  const LoadedData d = Read("id,x,d\n1,0,1\n2,1,1\n", &edges);
  EXPECT_EQ(d.data.observed_edges.size(), 1u);
  EXPECT_EQ(d.warnings.size(), 1u);
}

TEST(ReadObservedData, ErrorsCarryLineNumbers) {
  EXPECT_EQ(LineOf("id,x,d\n1,0,1\n2,abc,1\n"), 3);
  EXPECT_EQ(LineOf("id,x,d\n1,0,-1\n"), 2);
  EXPECT_EQ(LineOf("id,x,d\n1,0,1\n1,0,1\n"), 3);
  EXPECT_EQ(LineOf("id,x,d\n1,0\n"), 2);
  EXPECT_EQ(LineOf("id,y\n1,0\n"), 1);
  const std::string unknown = "id_i,id_j\n1,2\n1,9\n";
  EXPECT_EQ(LineOf("id,x,d\n1,0,1\n2,0,1\n", &unknown), 3);
  const std::string loop = "id_i,id_j\n2,2\n";
  EXPECT_EQ(LineOf("id,x,d\n1,0,1\n2,0,1\n", &loop), 2);
  EXPECT_THROW(Read("id,x,d\n"), ParseError);
}

TEST(ReadObservedData, SkipsBlankAndCommentLines) {
  const LoadedData d = Read("# study\nid,x,d\n\n1,0,1\n# note\n2,1,1\n");
  EXPECT_EQ(d.data.n(), 2);
}

TEST(WithGlobalDegreeBound, ReplacesEveryDegree) {
  ObservedData data = Read("id,x,d\n1,0,1\n2,1,0\n").data;
  data = WithGlobalDegreeBound(std::move(data), 6);
  EXPECT_EQ(data.degrees, (std::vector<std::int64_t>{6, 6}));
  EXPECT_THROW(WithGlobalDegreeBound(data, -1), std::invalid_argument);
}

}  // namespace
}  // namespace depbound
