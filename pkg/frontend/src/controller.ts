// Session controller: the headless state machine behind the view.
//
// One in-flight mutation at a time (busy flag); every click maps to one
// service call and the view re-renders from the returned payload.  Trace
// replay never steps outside the imported trace: navigation re-imports the
// verbatim prefix of the original trace text, so the server revalidates
// the digest chain each time.

import { Api } from './api.js'
import {
  EnabledEntry, ParsedTrace, StatePayload, Value,
  parseTrace, prefixTrace, transitionLabel,
} from './types.js'

export interface HistoryEntry {
  label: string
  digest: string
  inCycle: boolean
}

export interface ViewState {
  session: string | null
  connected: boolean
  busy: boolean
  error: string | null
  digest: string
  step: number
  variables: Array<{ name: string; value: string }>
  timers: Array<{ name: string; value: number; mono: boolean }>
  clocks: Array<{ label: string; value: number; urgent: boolean }>
  pendingEvent: string | null
  lastTransition: string | null
  enabled: Array<{ label: string; urgent: boolean; successors: number;
                   clickable: boolean }>
  history: HistoryEntry[]
  replay: { position: number; total: number; cycleStart: number | null } | null
}

export class SessionController {
  private sid: string | null = null
  private lastState: StatePayload | null = null
  private lastEnabled: EnabledEntry[] = []
  private history: HistoryEntry[] = []
  private trace: ParsedTrace | null = null
  private replayPos = 0
  busy = false
  errorMessage: string | null = null
  onChange: (() => void) | null = null

  constructor(private api: Api) {}

  private notify() {
    if (this.onChange) this.onChange()
  }

  private async mutate<T>(fn: () => Promise<T>): Promise<T | null> {
    if (this.busy) return null
    this.busy = true
    this.errorMessage = null
    this.notify()
    try {
      return await fn()
    } catch (err) {
      this.errorMessage = err instanceof Error ? err.message : String(err)
      return null
    } finally {
      this.busy = false
      this.notify()
    }
  }

  async connect(seed = 0): Promise<void> {
    await this.mutate(async () => {
      const made = await this.api.createSession(seed)
      this.sid = made.id
      this.lastState = made.state
      this.history = []
      this.trace = null
      await this.refreshEnabled()
    })
  }

  get sessionId(): string | null {
    return this.sid
  }

  private async refreshEnabled(): Promise<void> {
    if (!this.sid) return
    const payload = await this.api.enabled(this.sid)
    this.lastEnabled = payload.transitions
  }

  async refresh(): Promise<void> {
    await this.mutate(async () => {
      if (!this.sid) return
      this.lastState = await this.api.state(this.sid)
      await this.refreshEnabled()
    })
  }

  /** Accept a push payload from the event stream. */
  acceptPush(state: StatePayload): void {
    if (this.sid && state.session === this.sid && !this.busy) {
      this.lastState = state
      this.notify()
    }
  }

  enabledLabels(): string[] {
    return this.lastEnabled.map(e => e.label)
  }

  async fireByLabel(label: string, choice?: Value[]): Promise<boolean> {
    const entry = this.lastEnabled.find(
      e => e.label === label || e.label.split('  [')[0] === label,
    )
    if (!entry) {
      this.errorMessage = `not enabled: ${label}`
      this.notify()
      return false
    }
    const result = await this.mutate(async () => {
      const state = await this.api.fire(this.sid!, entry.transition, choice)
      this.record(entry.label.split('  [')[0], state)
      this.lastState = state
      await this.refreshEnabled()
      return true
    })
    return result === true
  }

  private record(label: string, state: StatePayload) {
    this.history.push({ label, digest: state.digest, inCycle: false })
  }

  async undo(k = 1): Promise<void> {
    await this.mutate(async () => {
      const state = await this.api.undo(this.sid!, k)
      this.history.splice(this.history.length - k, k)
      this.lastState = state
      await this.refreshEnabled()
    })
  }

  async exportTrace(): Promise<string> {
    if (!this.sid) throw new Error('no session')
    return this.api.exportTrace(this.sid)
  }

  // ── trace replay ─────────────────────────────────────────────

  async loadTrace(text: string): Promise<boolean> {
    const parsed = parseTrace(text)
    const ok = await this.mutate(async () => {
      const position = parsed.cycleStart ?? parsed.steps.length
      const state = await this.api.importTrace(
        this.sid!, prefixTrace(parsed, position),
      )
      this.trace = parsed
      this.replayPos = position
      this.rebuildReplayHistory()
      this.lastState = state
      await this.refreshEnabled()
      return true
    })
    return ok === true
  }

  private rebuildReplayHistory() {
    if (!this.trace) return
    this.history = this.trace.steps.slice(0, this.replayPos).map((s, k) => ({
      label: transitionLabel(s.transition),
      digest: s.digest,
      inCycle: this.trace!.cycleStart !== null && k >= this.trace!.cycleStart,
    }))
  }

  get replaying(): boolean {
    return this.trace !== null
  }

  async replayJump(position: number): Promise<void> {
    if (!this.trace) return
    const clamped = Math.max(0, Math.min(position, this.trace.steps.length))
    await this.mutate(async () => {
      const state = await this.api.importTrace(
        this.sid!, prefixTrace(this.trace!, clamped),
      )
      this.replayPos = clamped
      this.rebuildReplayHistory()
      this.lastState = state
      await this.refreshEnabled()
    })
  }

  async replayNext(): Promise<void> {
    // Past the end, wrap around the cycle (a lasso repeats forever).
    if (!this.trace) return
    if (this.replayPos >= this.trace.steps.length
        && this.trace.cycleStart !== null) {
      await this.replayJump(this.trace.cycleStart + 1)
      return
    }
    await this.replayJump(this.replayPos + 1)
  }

  async replayPrev(): Promise<void> {
    await this.replayJump(this.replayPos - 1)
  }

  async replayJumpToCycle(): Promise<void> {
    if (this.trace?.cycleStart != null) {
      await this.replayJump(this.trace.cycleStart)
    }
  }

  async leaveReplay(): Promise<void> {
    this.trace = null
    this.notify()
  }

  // ── the pure view projection ─────────────────────────────────

  view(): ViewState {
    const s = this.lastState
    const cfg = s?.configuration
    return {
      session: this.sid,
      connected: s !== null,
      busy: this.busy,
      error: this.errorMessage,
      digest: s?.digest ?? '',
      step: s?.step ?? 0,
      variables: cfg
        ? Object.entries(cfg.variables).map(([name, value]) => ({
            name, value: JSON.stringify(value),
          }))
        : [],
      timers: cfg
        ? Object.entries(cfg.timers).map(([name, t]) => ({
            name, value: t.value, mono: t.mono,
          }))
        : [],
      clocks: cfg
        ? cfg.clocks.map(c => ({
            label: c.fair.length > 0
              ? `${c.event}(${c.fair.map(String).join(', ')})`
              : c.event,
            value: c.value,
            urgent: c.urgent,
          }))
        : [],
      pendingEvent: cfg?.pending ? transitionLabel(cfg.pending) : null,
      lastTransition: cfg?.last ? transitionLabel(cfg.last) : null,
      enabled: this.lastEnabled.map(e => ({
        label: e.label,
        urgent: e.urgent,
        successors: e.successors,
        // While an e# is pending, only the pending event is offered by the
        // service, so everything served stays clickable unless busy or in
        // replay mode.
        clickable: !this.busy && !this.replaying,
      })),
      history: [...this.history],
      replay: this.trace
        ? {
            position: this.replayPos,
            total: this.trace.steps.length,
            cycleStart: this.trace.cycleStart,
          }
        : null,
    }
  }
}
