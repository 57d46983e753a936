"""Frozen image of D(D2A1) in F, solved once from the B4 relation.

Regenerate with freering.derive_d3a1_rule(); a test keeps the two in sync.
"""

D3A1_RULE_TERMS = [
 {
  "monomial": {
   "L": 4
  },
  "coeff": "-23/3125"
 },
 {
  "monomial": {
   "L": 9
  },
  "coeff": "341/9765625"
 },
 {
  "monomial": {
   "L": 14
  },
  "coeff": "-714/30517578125"
 },
 {
  "monomial": {
   "L": 19
  },
  "coeff": "396/95367431640625"
 },
 {
  "monomial": {
   "D2A1": 1
  },
  "coeff": "3"
 },
 {
  "monomial": {
   "L": 5,
   "D2A1": 1
  },
  "coeff": "-3/3125"
 },
 {
  "monomial": {
   "DA1": 1
  },
  "coeff": "-2"
 },
 {
  "monomial": {
   "L": 5,
   "DA1": 1
  },
  "coeff": "14/3125"
 },
 {
  "monomial": {
   "L": 10,
   "DA1": 1
  },
  "coeff": "-12/9765625"
 },
 {
  "monomial": {
   "L": 1,
   "DA1": 2
  },
  "coeff": "3"
 },
 {
  "monomial": {
   "L": 5,
   "A1": 1
  },
  "coeff": "9/625"
 },
 {
  "monomial": {
   "L": 10,
   "A1": 1
  },
  "coeff": "-33/1953125"
 },
 {
  "monomial": {
   "L": 15,
   "A1": 1
  },
  "coeff": "24/6103515625"
 },
 {
  "monomial": {
   "L": 1,
   "A1": 1,
   "D2A1": 1
  },
  "coeff": "4"
 },
 {
  "monomial": {
   "L": 1,
   "A1": 1,
   "DA1": 1
  },
  "coeff": "-4"
 },
 {
  "monomial": {
   "L": 6,
   "A1": 1,
   "DA1": 1
  },
  "coeff": "4/3125"
 },
 {
  "monomial": {
   "L": 6,
   "A1": 2
  },
  "coeff": "-3/625"
 },
 {
  "monomial": {
   "L": 11,
   "A1": 2
  },
  "coeff": "3/1953125"
 },
 {
  "monomial": {
   "L": 2,
   "A1": 2,
   "DA1": 1
  },
  "coeff": "-6"
 },
 {
  "monomial": {
   "L": 3,
   "A1": 4
  },
  "coeff": "1"
 }
]
