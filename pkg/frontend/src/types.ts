// Payload types of the simulator service protocol.  These mirror the
// canonical JSON emitted by the server; the client never computes
// semantics, it only projects these payloads into the view.

export type TransitionJson =
  | { kind: 'tick' }
  | { kind: 'event' | 'hash'; event: string; fair: Value[]; demonic: Value[] }

export type Value = number | boolean | string | Value[]

export interface ClockEntry {
  event: string
  fair: Value[]
  value: number
  urgent: boolean
}

export interface ConfigurationJson {
  variables: Record<string, Value>
  timers: Record<string, { value: number; mono: boolean }>
  clocks: ClockEntry[]
  pending: TransitionJson | null
  last: TransitionJson | null
}

export interface StatePayload {
  session: string
  step: number
  digest: string
  configuration: ConfigurationJson
  pending: number
  cycle_start: number | null
}

export interface EnabledEntry {
  transition: TransitionJson
  label: string
  successors: number
  urgent: boolean
}

export interface EnabledPayload {
  session: string
  transitions: EnabledEntry[]
}

export interface ModelInfo {
  name: string
  digest: string
  properties: string[]
  version: string
}

export interface TraceStep {
  transition: TransitionJson
  choice: Value[] | null
  digest: string
}

export interface ParsedTrace {
  header: string // the verbatim header line
  steps: TraceStep[]
  stepLines: string[] // verbatim step lines, parallel to steps
  cycleStart: number | null
}

export function parseTrace(text: string): ParsedTrace {
  const lines = text.split('\n').filter(l => l.trim().length > 0)
  if (lines.length === 0) throw new Error('empty trace')
  const header = lines[0]
  const head = JSON.parse(header)
  if (head.kind !== 'header') throw new Error('trace has no header line')
  const steps: TraceStep[] = []
  const stepLines: string[] = []
  let cycleStart: number | null = null
  for (const line of lines.slice(1)) {
    const obj = JSON.parse(line)
    if (obj.kind === 'cycle') {
      cycleStart = steps.length
      continue
    }
    if (obj.kind !== 'step') throw new Error(`unknown trace line ${obj.kind}`)
    steps.push({ transition: obj.transition, choice: obj.choice, digest: obj.digest })
    stepLines.push(line)
  }
  return { header, steps, stepLines, cycleStart }
}

export function prefixTrace(trace: ParsedTrace, upTo: number): string {
  // A truncated trace (without the cycle marker) replays fully on import.
  return [trace.header, ...trace.stepLines.slice(0, upTo)].join('\n') + '\n'
}

export function transitionLabel(t: TransitionJson): string {
  if (t.kind === 'tick') return 'tick'
  const fair = t.fair.map(String).join(', ')
  const dem = t.demonic.map(String).join(', ')
  let text = t.event
  if (fair.length > 0 || dem.length > 0) {
    text += '(' + fair + (dem.length > 0 ? '; ' + dem : '') + ')'
  }
  return text + (t.kind === 'hash' ? '#' : '')
}
