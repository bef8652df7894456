// Bundled rubric descriptors. These strings must stay byte-identical to the
// service's rubric data; the session verifies the server payload against
// this copy at load time.

import type { RubricCategory } from "./api.js";

export const BUNDLED_RUBRIC: RubricCategory[] = [
  {
    code: "SI",
    name: "Speech Intelligibility",
    phase: 1,
    descriptors: {
      "5": "Voice is clear, all words identifiable",
      "4": "Voice is mostly clear; single word unclear",
      "3": "Voice understandable; multiple words unclear",
      "2": "Difficult to understand most words in a phrase",
      "1": "Difficult to understand any words in a phrase",
    },
  },
  {
    code: "VN",
    name: "Voice Naturalness",
    phase: 1,
    descriptors: {
      "5": "Voice consistently paced with similar timbre across the entire phrase; good voice quality",
      "4": "Some disjointness in terms of pacing/timbre; mediocre but plausible voice quality",
      "3": "Significant differences in pacing/timbre across different portions of the phrase; weak voice consistency across different parts of the phrase",
      "2": "Substantial differences in pacing/timbre across different portions of the phrase; distinctly different voices for different words/parts of the phrase",
      "1": "No consistency in terms of voice or pacing across the phrase",
    },
  },
  {
    code: "SP",
    name: "Start of phrase & first word quality",
    phase: 2,
    descriptors: {
      "5": "First word is clear; excellent starting quality & intelligibility",
      "4": "Understandable; minor distortions or noise; low intensity starts of first word",
      "3": "Start of first word unclear or more significant distortions of first work or start of phrase",
      "2": "First word missing or strongly distorted; distortions or noise impact strongly on phrase intelligibility",
      "1": "Start of phrase unintelligible, missing or severely distorted",
    },
  },
  {
    code: "MP",
    name: "Middle of phrase & central word quality",
    phase: 2,
    descriptors: {
      "5": "Middle of phrase is clear; excellent voice quality & intelligibility",
      "4": "Understandable; minor distortions or noise; some pacing variations or slurring of single word",
      "3": "Significant distortions of middle phrase or slurring of multiple words but still intelligible",
      "2": "Substantial distortions; multi-word slurring or noise impact strongly on phrase intelligibility",
      "1": "Middle of phrase unintelligible, missing or severely distorted",
    },
  },
  {
    code: "EP",
    name: "End of phrase & last word quality",
    phase: 2,
    descriptors: {
      "5": "Last word has excellent quality",
      "4": "Understandable; minor distortions or noise",
      "3": "Understandable; but significant distortions or noise",
      "2": "Not understandable; substantial distortions, missing or unintelligible words or noise",
      "1": "Multiple words not understandable",
    },
  },
];

export function bundledCategory(code: string): RubricCategory | undefined {
  return BUNDLED_RUBRIC.find((c) => c.code === code);
}

/** Returns a description of the first mismatch, or null when byte-equal. */
export function rubricMismatch(serverRubric: RubricCategory[]): string | null {
  for (const cat of serverRubric) {
    const bundled = bundledCategory(cat.code);
    if (!bundled) return `unknown category ${cat.code}`;
    if (bundled.name !== cat.name) return `${cat.code}: name differs`;
    for (const score of ["5", "4", "3", "2", "1"]) {
      if (bundled.descriptors[score] !== cat.descriptors[score]) {
        return `${cat.code}: descriptor ${score} differs`;
      }
    }
  }
  return null;
}
