// Browser wiring: connect the controller to the DOM and the push channel.

import { Api } from './api.js'
import { SessionController } from './controller.js'
import {
  renderBanner, renderEnabled, renderHistory, renderReplayControls,
  renderStateTables,
} from './render.js'
import { StatePayload } from './types.js'

const api = new Api(window.location.origin)
const controller = new SessionController(api)

function el(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing #${id}`)
  return node
}

let events: EventSource | null = null

function subscribe() {
  if (events) events.close()
  const sid = controller.sessionId
  if (!sid) return
  events = new EventSource(`/sessions/${sid}/events`)
  events.onmessage = msg => {
    controller.acceptPush(JSON.parse(msg.data) as StatePayload)
  }
  events.onerror = () => {
    // EventSource retries on its own; surface nothing unless fetches fail.
  }
}

function render() {
  const view = controller.view()
  el('banner').innerHTML = renderBanner(view)
  el('state').innerHTML = renderStateTables(view)
  el('enabled').innerHTML = renderEnabled(view)
  el('history').innerHTML = renderHistory(view)
  el('replay').innerHTML = renderReplayControls(view)
}

async function fireAt(index: number) {
  const view = controller.view()
  const entry = view.enabled[index]
  if (!entry || !entry.clickable) return
  if (entry.successors > 1) {
    const answer = window.prompt(
      `${entry.label} has ${entry.successors} outcomes; demonic draws ` +
      '(space-separated), or empty for a seeded random draw:', '')
    if (answer === null) return
    const values = answer.trim().length > 0
      ? answer.trim().split(/\s+/).map(tok => {
          if (tok === 'true') return true
          if (tok === 'false') return false
          const n = Number(tok)
          return Number.isNaN(n) ? tok : n
        })
      : undefined
    await controller.fireByLabel(entry.label, values)
    return
  }
  await controller.fireByLabel(entry.label)
}

function wire() {
  controller.onChange = render

  el('enabled').addEventListener('click', ev => {
    const target = ev.target as HTMLElement
    const button = target.closest('button.fire') as HTMLButtonElement | null
    if (button?.dataset.index !== undefined) {
      void fireAt(Number(button.dataset.index))
    }
  })

  el('undo').addEventListener('click', () => void controller.undo(1))

  el('export').addEventListener('click', async () => {
    const text = await controller.exportTrace()
    const blob = new Blob([text], { type: 'application/json' })
    const link = document.createElement('a')
    link.href = URL.createObjectURL(blob)
    link.download = 'trace.jsonl'
    link.click()
    URL.revokeObjectURL(link.href)
  })

  const file = el('trace-file') as HTMLInputElement
  file.addEventListener('change', async () => {
    const chosen = file.files?.[0]
    if (!chosen) return
    const text = await chosen.text()
    const ok = await controller.loadTrace(text)
    if (!ok) {
      window.alert(controller.errorMessage ?? 'trace import failed')
    }
    file.value = ''
  })

  el('replay').addEventListener('click', ev => {
    const target = (ev.target as HTMLElement).closest('button')
    if (!target) return
    const action = target.dataset.replay
    if (action === 'prev') void controller.replayPrev()
    else if (action === 'next') void controller.replayNext()
    else if (action === 'cycle') void controller.replayJumpToCycle()
    else if (action === 'leave') void controller.leaveReplay()
  })

  el('banner').addEventListener('click', ev => {
    const target = (ev.target as HTMLElement).closest('button')
    if (target?.dataset.action === 'retry') void boot()
  })
}

async function boot() {
  await controller.connect(0)
  subscribe()
  render()
  const info = await api.model().catch(() => null)
  if (info) {
    el('title').textContent = `${info.name} · ${info.digest}`
  }
}

wire()
void boot()
