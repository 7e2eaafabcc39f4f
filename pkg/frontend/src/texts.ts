/**
 * Fixed survey copy: the three instruction screens shown before the
 * questionnaire, and the recurring question prompt.  Everything else a
 * respondent reads (statements, Likert labels, profile categories) comes
 * from the service payloads.
 */

export const QUESTION_PROMPT =
  'In your opinion, which distribution is the least unequal?';

export const INSTRUCTIONS_1 = {
  title: 'General description of the study',
  paragraphs: [
    'The study you have agreed to take part in is being carried out by ' +
      'several French university research centres, specialised in the study ' +
      'of inequality. Our aim is to construct inequality indicators in order ' +
      'to measure the impact on income distribution of government ' +
      'interventions in the economic sphere. These interventions may concern ' +
      'areas as diverse as taxation, family policy, the pension system, ' +
      'housing subsidies and the financing of the healthcare system, to name ' +
      'but a few.',
    'These different government interventions are likely to modify the ' +
      'incomes of members of society. We believe that the indicators used to ' +
      'assess the impact of these interventions on income distribution ' +
      'should reflect, as far as possible, the point of view of members of ' +
      'society, who are the first to be affected. Your participation in this ' +
      'study will enable us to gather a range of opinions representative of ' +
      'the different points of view on inequality within French society.',
  ],
};

export const INSTRUCTIONS_2 = {
  title: 'This study is in three parts',
  paragraphs: [
    'The first part consists of 44 questions. For each question, we will ' +
      'present you with two income distributions and ask you to indicate ' +
      'which of these two distributions you think is the least unequal.',
    'After each group of 11 questions, you will be able to consult your ' +
      'answers and, if you wish, modify them. We would like to stress that ' +
      'there are no right or wrong answers: we are only interested in your ' +
      'personal opinion.',
    'In the second part, we will ask you whether you agree or disagree with ' +
      'a number of statements about the impact on inequality of different ' +
      'types of income redistribution between individuals. Again, there is ' +
      'no right or wrong answer: you are free to agree or disagree with the ' +
      'statements.',
    'In the third part, we will ask you a series of personal questions to ' +
      'help us situate you in French society. The aim here is to ensure that ' +
      'all the people who took part in this study are as faithful a ' +
      'representation of French society as possible.',
    'We would like to stress that your answers will remain anonymous. ' +
      'Similarly, all personal information collected will remain ' +
      'confidential. It will only be used for our research work and it will ' +
      'not be possible to identify you from the information collected. It is ' +
      'imperative for the success of this study that you take the utmost ' +
      'care when reading the questions and answering them. It is also ' +
      'important that you complete the questionnaire to the end. We estimate ' +
      'that the average time spent answering the questionnaire should not ' +
      'exceed 30 minutes. When we have completed our survey, you will ' +
      'receive an e-mail with a link to the results.',
  ],
};

export const INSTRUCTIONS_3 = {
  title: 'Part One',
  paragraphs: [
    'Imagine a society consisting of 5 perfectly identical individuals: ' +
      'there are no personal characteristics to distinguish them from one ' +
      'another. There is no reason why they should be treated differently.',
    'We are interested in the level of inequality in this society by ' +
      'considering only the income of individuals, expressed in thousands of ' +
      'euros. In each question in this first part, two competing economic ' +
      'policies are considered, each leading to a particular income ' +
      'distribution: Distribution A and Distribution B.',
    'The sum of distributed income is the same in both distributions.',
    'You are asked to compare these two distributions from the point of ' +
      'view of inequality:',
  ],
  bullets: [
    'If you consider that Distribution A is less unequal than Distribution ' +
      "B, then tick the 'Distribution A' box.",
    'If you consider that Distribution B is less unequal than Distribution ' +
      "A, then tick the 'Distribution B' box.",
    'Finally, if you are unable to decide, or if you consider that the two ' +
      "distributions are equivalent, then tick the 'Equivalent' box.",
  ],
  sample: {
    heading: 'Sample question:',
    a: [2, 6, 10, 14, 18],
    b: [3, 6, 10, 14, 17],
  },
  closing: 'The questionnaire will now begin.',
};
